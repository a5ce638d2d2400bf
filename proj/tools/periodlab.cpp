#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "periodlab.hpp"
#include "periodlab/lmfdb_http.hpp"

#ifndef PERIODLAB_DATA_DIR
#define PERIODLAB_DATA_DIR "data"
#endif

using namespace periodlab;

namespace {

// Exit codes: 0 verified or success, 1 not verified, 2 usage or domain error.
constexpr int kOk = 0;
constexpr int kNotVerified = 1;
constexpr int kFailure = 2;

struct Common {
  int prec = 100;
  std::string format = "text";
  bool offline = false;
  std::string cache_dir;
  std::string url_template;
};

using Fields = std::vector<std::pair<std::string, std::string>>;

void emit(const Common& c, const Fields& kv, const std::string& text) {
  if (c.format == "kv")
    write_kv(std::cout, kv);
  else
    std::cout << text;
}

std::string data_file(const std::string& name) { return std::string(PERIODLAB_DATA_DIR) + "/" + name; }

Operator load_operator(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::parse, "cannot open operator file " + file);
  return parse_operator(in);
}

LmfdbConfig lmfdb_config(const Common& c) {
  LmfdbConfig cfg;
  cfg.cache_dir = c.cache_dir.empty() ? default_cache_dir(data_file("cache")) : std::filesystem::path(c.cache_dir);
  if (!c.url_template.empty())
    cfg.url_template = c.url_template;
  else if (const char* env = std::getenv("PERIODLAB_LMFDB_URL_TEMPLATE"); env && *env)
    cfg.url_template = env;
  cfg.offline = c.offline;
  if (const char* env = std::getenv("PERIODLAB_OFFLINE"); env && std::string(env) == "1") cfg.offline = true;
  return cfg;
}

/// Largest n whose coefficient an L-value at `prec` can need, from the label.
long coefficients_needed(const std::string& label, int prec) {
  ModularForm f;
  f.level = std::stol(label.substr(0, label.find('.')));
  f.weight = std::stoi(label.substr(label.find('.') + 1));
  long n = 0;
  for (const Rational& t : {Rational(1), Rational(6, 5), Rational(3, 2)}) n = std::max(n, l_value_cutoff(f, prec, t));
  return n;
}

ModularForm load_form_for(const std::string& spec, const Common& c, int prec) {
  const long upto = valid_label(spec) ? coefficients_needed(spec, prec) : 0;
  return load_form(spec, upto, lmfdb_config(c), c.offline ? Transport{} : http_transport());
}

std::string complex_str(const Complex& z, int digits) {
  return format_real(z.re, digits) + " " + format_real(z.im, digits);
}

std::string matrix_text(const Mat4<Rational>& m) {
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) {
    os << " ";
    for (int j = 0; j < 4; ++j) os << ' ' << std::setw(5) << format_rational(m[i][j]);
    os << '\n';
  }
  return os.str();
}

std::string matrix_row(const Mat4<Rational>& m, int i) {
  std::ostringstream os;
  for (int j = 0; j < 4; ++j) os << (j ? " " : "") << format_rational(m[i][j]);
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_frobenius(const Common&, const std::string& op_file, int n) {
  const Operator op = load_operator(op_file);
  const CanonicalBasis b = frobenius_mum(op, n);
  for (int k = 0; k < 4; ++k) {
    std::cout << 'f' << k << ':';
    for (const auto& c : b.f[static_cast<std::size_t>(k)]) std::cout << ' ' << format_rational(c);
    std::cout << '\n';
  }
  return kOk;
}

PathPlan path_for(const Operator& op, const Rational& from, const Rational& to, const std::string& path_file, int prec) {
  if (!path_file.empty()) {
    PathPlan p = read_path_file(path_file);
    if (abs(p.start() - Complex(from)) > pow10(-prec) || abs(p.end() - Complex(to)) > pow10(-prec))
      throw Error(ErrorKind::usage, "path file must run from " + format_rational(from) + " to " + format_rational(to));
    return p;
  }
  const auto singular = finite_singular_values(op, working_digits(prec));
  return plan_path(Complex(from), Complex(to), singular, default_clearance(Complex(from), Complex(to), singular));
}

int cmd_continue(const Common& c, const std::string& op_file, const std::string& from, const std::string& to,
                 const std::string& path_file) {
  PrecisionScope scope(working_digits(c.prec));
  const Operator op = load_operator(op_file);
  const PathPlan path = path_for(op, parse_rational(from), parse_rational(to), path_file, c.prec);
  const TransportTrace tr = transport_traced(op, path, c.prec);
  Fields kv{{"from", from}, {"to", to}, {"segments", std::to_string(path.segment_count())},
            {"steps", std::to_string(tr.steps)}, {"min_abs_wronskian", format_real(tr.min_abs_det, 6)},
            {"log_re", format_real(tr.state.at.log_value.re, c.prec)}, {"log_im", format_real(tr.state.at.log_value.im, c.prec)}};
  std::ostringstream text;
  text << "transported " << from << " -> " << to << " in " << tr.steps << " steps\n";
  for (int i = 0; i < 4; ++i) {
    for (int m = 0; m < 4; ++m) {
      const std::string key = "w" + std::to_string(i) + "_d" + std::to_string(m);
      kv.emplace_back(key + "_re", format_real(tr.state.w[i][m].re, c.prec));
      kv.emplace_back(key + "_im", format_real(tr.state.w[i][m].im, c.prec));
    }
    text << "  w" << i << " = " << complex_str(tr.state.w[i][0], 30) << '\n';
  }
  emit(c, kv, text.str());
  return kOk;
}

int cmd_monodromy(const Common& c, const std::string& op_file, const std::string& base, const std::string& around) {
  PrecisionScope scope(working_digits(c.prec));
  const Operator op = load_operator(op_file);
  const Monodromy m = monodromy(op, Complex(parse_rational(base)), Complex(parse_rational(around)), c.prec);
  Fields kv{{"base", base}, {"around", around}, {"rationalized", m.exact ? "yes" : "no"}};
  std::ostringstream text;
  text << "monodromy around " << around << " from " << base << '\n';
  if (m.exact) {
    for (int i = 0; i < 4; ++i) kv.emplace_back("row" + std::to_string(i), matrix_row(*m.exact, i));
    kv.emplace_back("residual", format_real(m.residual, 6));
    text << matrix_text(*m.exact) << "  residual " << format_real(m.residual, 6) << '\n';
  } else {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const std::string key = "m" + std::to_string(i) + std::to_string(j);
        kv.emplace_back(key + "_re", format_real(m.numeric[i][j].re, c.prec));
        kv.emplace_back(key + "_im", format_real(m.numeric[i][j].im, c.prec));
        text << "  " << key << " = " << complex_str(m.numeric[i][j], 20) << '\n';
      }
  }
  emit(c, kv, text.str());
  return kOk;
}

int cmd_deligne(const Common& c, const std::string& op_file, const std::string& mirror_file, const std::string& base,
                const std::string& target, const std::string& path_file) {
  PrecisionScope scope(working_digits(c.prec));
  const Operator op = load_operator(op_file);
  const MirrorData md = read_mirror_file(mirror_file);
  const PathPlan path = path_for(op, parse_rational(base), parse_rational(target), path_file, c.prec);
  const StateMatrix W = transport_traced(op, path, c.prec).state;
  const SMatrix S = build_S(md, c.prec);
  const Involution f = f_infinity(S, W, c.prec);
  if (!f.exact) throw Error(ErrorKind::inconsistency, "F_infinity did not rationalize; check the path and branch");
  const EigenBases b = eigenspace_bases(f);
  const Complex cp = tate_twist(c_plus(S, W, b, c.prec), 2, c.prec);
  const Complex cm = c_minus(S, W, b, c.prec);
  auto vec = [](const IntVec4& v) {
    std::ostringstream os;
    for (int i = 0; i < 4; ++i) os << (i ? "," : "") << v[i];
    return os.str();
  };
  Fields kv{{"target", target}};
  for (int i = 0; i < 4; ++i) kv.emplace_back("f_infinity_row" + std::to_string(i), matrix_row(*f.exact, i));
  kv.emplace_back("f_infinity_residual", format_real(f.residual, 6));
  kv.emplace_back("eigen_plus", vec(b.plus[0]) + ";" + vec(b.plus[1]));
  kv.emplace_back("eigen_minus", vec(b.minus[0]) + ";" + vec(b.minus[1]));
  kv.emplace_back("c_plus_re", format_real(cp.re, c.prec));
  kv.emplace_back("c_plus_im", format_real(cp.im, c.prec));
  kv.emplace_back("c_minus_re", format_real(cm.re, c.prec));
  kv.emplace_back("c_minus_im", format_real(cm.im, c.prec));
  std::ostringstream text;
  text << "F_infinity at " << target << ":\n" << matrix_text(*f.exact);
  text << "  plus basis  " << kv[6].second << "\n  minus basis " << kv[7].second << '\n';
  text << "  c+(2) = " << complex_str(cp, 30) << "\n  c-    = " << complex_str(cm, 30) << '\n';
  emit(c, kv, text.str());
  return kOk;
}

int cmd_lvalue(const Common& c, const std::string& form, int s) {
  PrecisionScope scope(working_digits(c.prec));
  const ModularForm f = load_form_for(form, c, c.prec);
  const LValue v = l_value(f, s, c.prec);
  Fields kv{{"label", f.label}, {"weight", std::to_string(f.weight)}, {"level", std::to_string(f.level)},
            {"s", std::to_string(s)}, {"value", format_real(v.value, c.prec)}, {"eps", std::to_string(v.eps)},
            {"split_gap", format_real(v.split_gap, 6)}, {"terms", std::to_string(v.terms)}};
  std::ostringstream text;
  text << "L(" << f.label << ", " << s << ") = " << format_real(v.value, c.prec) << "\n  sign " << (v.eps > 0 ? "+1" : "-1")
       << ", " << v.terms << " terms\n";
  emit(c, kv, text.str());
  return kOk;
}

int cmd_jcheck(const Common& c, const std::string& vperp) {
  PrecisionScope scope(working_digits(c.prec));
  const Real v(vperp);
  const Complex j = j_invariant(Complex(Real(Rational(1, 2)), v), c.prec);
  const Real target = to_real(Rational(215 * 215 * 215, 28 * 28 * 28));
  const int digits = std::min(digits_agreement(j.re, target), c.prec);
  const bool ok = digits >= 10 && boost::multiprecision::abs(j.im) < pow10(-10) * target;
  Fields kv{{"vperp", vperp}, {"j_re", format_real(j.re, c.prec)}, {"j_im", format_real(j.im, 6)},
            {"target", "(215/28)^3"}, {"digits", std::to_string(digits)}, {"verified", ok ? "yes" : "no"}};
  std::ostringstream text;
  text << "j(1/2 + i v) = " << format_real(j.re, 40) << "\n(215/28)^3   = " << format_real(target, 40) << '\n'
       << digits << " digits agree: " << (ok ? "verified" : "not verified") << '\n';
  emit(c, kv, text.str());
  return ok ? kOk : kNotVerified;
}

int cmd_verify(const Common& c, const std::string& op_file, const std::string& mirror_file, const std::string& f2,
               const std::string& f4, const std::string& base, const std::string& target, const std::string& path_file) {
  PrecisionScope scope(working_digits(c.prec));
  PipelineInput in;
  in.prec = c.prec;
  in.op = load_operator(op_file);
  in.mirror = read_mirror_file(mirror_file);
  in.f2 = load_form_for(f2, c, c.prec);
  in.f4 = load_form_for(f4, c, c.prec);
  in.base = parse_rational(base);
  in.target = parse_rational(target);
  if (!path_file.empty()) in.path = path_for(in.op, in.base, in.target, path_file, c.prec);
  const DeligneReport r = run_pipeline(in);
  std::ostringstream text;
  write_text(text, r);
  emit(c, report_fields(r), text.str());
  return r.verified() ? kOk : kNotVerified;
}

int cmd_fetch(const Common& c, const std::string& label, long upto) {
  const LmfdbConfig cfg = lmfdb_config(c);
  const std::string payload = fetch_coefficients(label, upto, cfg, cfg.offline ? Transport{} : http_transport());
  const ModularForm f = parse_coefficients(payload);
  Fields kv{{"label", f.label}, {"weight", std::to_string(f.weight)}, {"level", std::to_string(f.level)},
            {"max_prime", std::to_string(f.max_prime())}, {"cache", cache_path(cfg.cache_dir, label).string()}};
  emit(c, kv, label + ": a_p for p <= " + std::to_string(f.max_prime()) + " in " + cache_path(cfg.cache_dir, label).string() + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodlab: periods of one-parameter Calabi-Yau operators and Deligne period checks"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--prec", common.prec, "decimal digits (at least 30)")->capture_default_str();
    sub->add_option("--format", common.format, "text or kv")->check(CLI::IsMember({"text", "kv"}))->capture_default_str();
  };
  auto add_net = [&](CLI::App* sub) {
    sub->add_flag("--offline", common.offline, "never touch the network");
    sub->add_option("--cache", common.cache_dir, "coefficient cache directory");
    sub->add_option("--lmfdb-url", common.url_template, "URL template with {label}");
  };

  std::string op_file = data_file("aesz34.op");
  std::string mirror_file = data_file("aesz34_k1.mirror");
  std::string path_file, from = "-1/50", to = "-1/7", around = "0", f2 = "14.2.a.a", f4 = "14.4.a.a";
  std::string base_mono = "1/100";
  std::string vperp = kVPerpReference;
  std::string form, label;
  int n = 5, s = 1;
  long upto = 1000;

  auto* frob = app.add_subcommand("frobenius", "print the canonical series coefficients f0..f3");
  frob->add_option("--op", op_file, "operator file")->capture_default_str();
  frob->add_option("-N", n, "truncation order")->check(CLI::NonNegativeNumber)->capture_default_str();

  auto* cont = app.add_subcommand("continue", "transport the canonical Wronskian along a path");
  add_common(cont);
  cont->add_option("--op", op_file, "operator file")->capture_default_str();
  cont->add_option("--from", from, "base point p/q")->capture_default_str();
  cont->add_option("--to", to, "target point p/q")->capture_default_str();
  cont->add_option("--path", path_file, "waypoint file");

  auto* mono = app.add_subcommand("monodromy", "monodromy matrix of the canonical basis");
  add_common(mono);
  mono->add_option("--op", op_file, "operator file")->capture_default_str();
  mono->add_option("--base", base_mono, "base point p/q")->capture_default_str();
  mono->add_option("--around", around, "singular point p/q")->capture_default_str();

  auto* del = app.add_subcommand("deligne", "F_infinity, eigenbases and c+- at the target");
  add_common(del);
  del->add_option("--op", op_file, "operator file")->capture_default_str();
  del->add_option("--mirror", mirror_file, "mirror data file")->capture_default_str();
  del->add_option("--base", from, "base point p/q")->capture_default_str();
  del->add_option("--target", to, "target point p/q")->capture_default_str();
  del->add_option("--path", path_file, "waypoint file");

  auto* lval = app.add_subcommand("lvalue", "L(f, s) at an integer point");
  add_common(lval);
  add_net(lval);
  lval->add_option("--form", form, "LMFDB label or coefficient file")->required();
  lval->add_option("--s", s, "integer point")->required();

  auto* jc = app.add_subcommand("jcheck", "check j(1/2 + i v) = (215/28)^3");
  add_common(jc);
  jc->add_option("--vperp", vperp, "decimal value of v")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "end-to-end Deligne period check");
  add_common(ver);
  add_net(ver);
  ver->add_option("--op", op_file, "operator file")->capture_default_str();
  ver->add_option("--mirror", mirror_file, "mirror data file")->capture_default_str();
  ver->add_option("--f2", f2, "weight-2 form, label or file")->capture_default_str();
  ver->add_option("--f4", f4, "weight-4 form, label or file")->capture_default_str();
  ver->add_option("--base", from, "base point p/q")->capture_default_str();
  ver->add_option("--target", to, "target point p/q")->capture_default_str();
  ver->add_option("--path", path_file, "waypoint file");

  auto* fetch = app.add_subcommand("fetch", "fill the coefficient cache for a label");
  add_common(fetch);
  add_net(fetch);
  fetch->add_option("--label", label, "LMFDB newform label")->required();
  fetch->add_option("--upto", upto, "largest prime needed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (common.prec < 30) throw Error(ErrorKind::usage, "--prec must be at least 30");
    if (*frob) return cmd_frobenius(common, op_file, n);
    if (*cont) return cmd_continue(common, op_file, from, to, path_file);
    if (*mono) return cmd_monodromy(common, op_file, base_mono, around);
    if (*del) return cmd_deligne(common, op_file, mirror_file, from, to, path_file);
    if (*lval) return cmd_lvalue(common, form, s);
    if (*jc) return cmd_jcheck(common, vperp);
    if (*ver) return cmd_verify(common, op_file, mirror_file, f2, f4, from, to, path_file);
    if (*fetch) return cmd_fetch(common, label, upto);
  } catch (const Error& e) {
    std::cerr << stage << ": " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << stage << ": " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
