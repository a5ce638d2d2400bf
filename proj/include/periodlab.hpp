#pragma once

#include "periodlab/error.hpp"
#include "periodlab/numeric.hpp"
#include "periodlab/polynomial.hpp"
#include "periodlab/exact_linalg.hpp"
#include "periodlab/pf_core.hpp"
#include "periodlab/continuation.hpp"
#include "periodlab/recognition.hpp"
#include "periodlab/mirror.hpp"
#include "periodlab/deligne.hpp"
#include "periodlab/qseries.hpp"
#include "periodlab/modular.hpp"
#include "periodlab/lfunc.hpp"
#include "periodlab/lmfdb.hpp"
#include "periodlab/pipeline.hpp"
