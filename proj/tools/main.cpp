// bsymp: singular symplectic structures from non-canonical changes of
// coordinates. Catalog browsing, classification, desingularization, flow
// integration, b-contact checks, and the one-shot verification suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bsymp/catalog.hpp"
#include "bsymp/classify.hpp"
#include "bsymp/contact.hpp"
#include "bsymp/desing.hpp"
#include "bsymp/dynamics.hpp"
#include "bsymp/form_text.hpp"
#include "bsymp/verify.hpp"
#include "bsymp/version.hpp"

using nlohmann::json;
using namespace bsymp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInconclusive = 2;

Rational parse_rational_text(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return make_rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

std::map<std::string, double> parse_point_text(const std::string& s) {
  std::map<std::string, double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("bad point entry '" + item + "' (want var=value)");
    std::string key = geo::detail::strip(item.substr(0, eq));
    out[key] = std::stod(item.substr(eq + 1));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    out << text;
  }
}

json base_report(const std::string& command, const json& config) {
  return json{{"tool", "bsymp"}, {"version", kVersion}, {"command", command}, {"config", config}};
}

json classification_json(const sing::Classification& r) {
  json j{{"verdict", sing::verdict_name(r.verdict)},
         {"m", r.m},
         {"exponent", rat_str(r.exponent)},
         {"method", r.method},
         {"seed", r.seed},
         {"residual_nonvanishing", r.residual_nonvanishing},
         {"residual_samples", r.residual_samples}};
  if (r.fit_quality) j["fit_quality"] = *r.fit_quality;
  if (r.verdict == sing::Verdict::Folded) j["restriction_ok"] = r.restriction_ok;
  if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
  return j;
}

struct FormSource {
  geo::Chart chart;
  geo::DifferentialForm form;
  std::optional<models::Model> model;
};

FormSource resolve_form(const std::string& model_name, const std::string& form_file,
                        const std::string& alpha_text, const std::string& gamma_text) {
  if (model_name.empty() == form_file.empty())
    throw Error("exactly one of --model and --form-file is required");
  if (!model_name.empty()) {
    std::optional<Rational> alpha, gamma;
    if (!alpha_text.empty()) alpha = parse_rational_text(alpha_text);
    if (!gamma_text.empty()) gamma = parse_rational_text(gamma_text);
    models::Model m = models::make_model(model_name, alpha, gamma);
    return {m.chart, m.form, std::move(m)};
  }
  geo::FormFile f = geo::parse_form_file(read_file(form_file));
  return {f.chart, f.form, std::nullopt};
}

// default transversal seed for a bare-coordinate defining function
std::map<std::string, double> default_seed_point(const geo::Chart& chart,
                                                 const std::string& zero_var) {
  std::map<std::string, double> p;
  double off = 0.3;
  for (const std::string& v : chart.vars) {
    p[v] = (v == zero_var) ? 0.0 : off;
    off += 0.25;
  }
  return p;
}

int cmd_classify(const std::string& model_name, const std::string& form_file,
                 const std::string& alpha_text, const std::string& gamma_text,
                 const std::string& var, const std::string& hyper,
                 const std::string& point_text, std::uint64_t seed,
                 const std::string& out_path) {
  json config{{"model", model_name},      {"form_file", form_file}, {"alpha", alpha_text},
              {"gamma", gamma_text},      {"var", var},             {"hypersurface", hyper},
              {"point", point_text},      {"seed", seed}};
  json report = base_report("classify", config);
  FormSource src = resolve_form(model_name, form_file, alpha_text, gamma_text);

  sing::Classification result;
  try {
    if (!hyper.empty()) {
      sing::Hypersurface z;
      z.defining = sym::parse(hyper);
      if (!point_text.empty()) {
        z.transversal_seed = parse_point_text(point_text);
      } else if (src.chart.index_of(hyper) >= 0) {
        z.transversal_seed = default_seed_point(src.chart, hyper);
      } else if (src.model && src.model->hypersurface) {
        z.transversal_seed = src.model->hypersurface->transversal_seed;
      } else {
        throw Error("--hypersurface needs --point unless it is a bare coordinate");
      }
      result = sing::classify_along_hypersurface(src.form, z, seed);
    } else if (!var.empty()) {
      result = sing::classify_along_coordinate(src.form, var, seed);
    } else if (src.chart.singular_var) {
      result = sing::classify_along_coordinate(src.form, *src.chart.singular_var, seed);
    } else if (src.model && src.model->hypersurface) {
      result = sing::classify_along_hypersurface(src.form, *src.model->hypersurface, seed);
    } else {
      throw Error("no singular locus: give --var or --hypersurface");
    }
  } catch (const PoorFit& e) {
    report["error"] = std::string("PoorFit: ") + e.what();
    emit(report, out_path);
    return kExitInconclusive;
  } catch (const GradientVanishes& e) {
    report["error"] = std::string("GradientVanishes: ") + e.what();
    emit(report, out_path);
    return kExitInconclusive;
  }
  report["classification"] = classification_json(result);
  emit(report, out_path);
  return result.verdict == sing::Verdict::Degenerate ? kExitInconclusive : kExitOk;
}

desing::GridSpec parse_grid(const std::string& text, int dim) {
  desing::GridSpec grid;
  if (text.empty()) {
    grid.assign(static_cast<std::size_t>(dim), desing::GridAxis{-1, 1, 11});
    return grid;
  }
  std::stringstream ss(text);
  std::string axis;
  while (std::getline(ss, axis, ',')) {
    desing::GridAxis ax;
    if (std::sscanf(axis.c_str(), "%lf:%lf:%d", &ax.lo, &ax.hi, &ax.count) != 3)
      throw Error("bad grid axis '" + axis + "' (want lo:hi:count)");
    grid.push_back(ax);
  }
  if (static_cast<int>(grid.size()) == 1) grid.assign(static_cast<std::size_t>(dim), grid[0]);
  if (static_cast<int>(grid.size()) != dim)
    throw Error("grid axes (" + std::to_string(grid.size()) + ") != chart dimension (" +
                std::to_string(dim) + ")");
  return grid;
}

int cmd_desing(const std::string& model_name, const std::string& form_file,
               const std::string& alpha_text, const std::string& var, int k, double eps,
               const std::string& grid_text, const std::string& eps_list,
               const std::string& csv_path, std::uint64_t seed, const std::string& out_path) {
  json config{{"model", model_name}, {"form_file", form_file}, {"alpha", alpha_text},
              {"var", var},          {"k", k},                 {"eps", eps},
              {"grid", grid_text},   {"eps_list", eps_list},   {"csv", csv_path},
              {"seed", seed}};
  json report = base_report("desing", config);
  FormSource src = resolve_form(model_name, form_file, alpha_text, "");
  const std::string zvar = !var.empty()
                               ? var
                               : src.chart.singular_var.value_or("");
  if (zvar.empty()) throw Error("desing needs --var or a chart with a singular variable");

  const desing::SmoothingProfile profile = desing::SmoothingProfile::make(k);
  const desing::NumericForm omega_eps = desing::desingularize(src.form, zvar, k, eps, profile);
  const desing::GridSpec grid = parse_grid(grid_text, src.chart.dim());

  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    for (const std::string& v : src.chart.vars) csv << v << ",";
    csv << "det\n";
  }
  desing::GridReport rep = desing::verify_symplectic_on_grid(
      omega_eps, grid, [&](const std::map<std::string, double>& p, double det) {
        if (!csv.is_open()) return;
        char buf[64];
        for (const std::string& v : src.chart.vars) {
          std::snprintf(buf, sizeof buf, "%.17g", p.at(v));
          csv << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", det);
        csv << buf << "\n";
      });

  report["grid"] = json{{"points", rep.points},
                        {"min_abs_det", rep.min_abs_det},
                        {"sign_constant", rep.sign_constant},
                        {"det_sign", rep.det_sign},
                        {"failures", rep.failures.size()}};

  if (!eps_list.empty()) {
    std::vector<double> epsilons;
    std::stringstream ss(eps_list);
    std::string e;
    while (std::getline(ss, e, ',')) epsilons.push_back(std::stod(e));
    Rng rng(seed);
    std::vector<std::map<std::string, double>> samples;
    const double cap = 0.9 * epsilons.back();
    for (int i = 0; i < 8; ++i) {
      std::map<std::string, double> p;
      for (const std::string& v : src.chart.vars) p[v] = rng.uniform(-1, 1);
      p[zvar] = rng.uniform(0.05 * cap, cap) * (rng.coin() ? 1.0 : -1.0);
      samples.push_back(std::move(p));
    }
    json conv = json::array();
    for (const auto& row : desing::convergence_report(src.form, zvar, k, profile, epsilons,
                                                      samples))
      conv.push_back(json{{"eps", row.eps}, {"sup_deviation", row.sup_deviation}});
    report["convergence"] = conv;
  }
  emit(report, out_path);
  return (rep.sign_constant && rep.failures.empty()) ? kExitOk : kExitInconclusive;
}

int cmd_integrate(const std::string& model_name, const std::string& alpha_text,
                  const std::string& x0_text, double span, const std::string& time_label,
                  double rtol, double atol, const std::string& out_path) {
  if (model_name != "double-collision")
    throw Error("integrate supports the double-collision model (it has the Hamiltonian)");
  if (alpha_text.empty()) throw Error("integrate needs --alpha");
  const Rational alpha = parse_rational_text(alpha_text);
  flow::PrimedSystem sys = flow::double_collision_system(alpha);
  const Rational beta = sys.model.params.at("beta");
  const bool primed = time_label != "t";

  const sym::Expression h = *sys.model.hamiltonian;
  flow::Monitor hmon{"H", [h](const flow::State& y) {
                       return sym::evaluate(
                           h, {{"r", y(0)}, {"theta", y(1)}, {"v", y(2)}, {"w", y(3)}});
                     }};
  flow::FlowSystem fs = flow::make_flow_system(primed ? sys.primed : sys.unprimed,
                                               primed ? "tau" : "t",
                                               {hmon, flow::mcgehee_first_integral(beta)});

  const auto point = parse_point_text(x0_text);
  flow::State x0(4);
  for (int i = 0; i < 4; ++i) {
    const std::string& v = sys.model.chart.vars[static_cast<std::size_t>(i)];
    auto it = point.find(v);
    if (it == point.end()) throw Error("--x0 is missing " + v);
    x0(i) = it->second;
  }
  if (x0(0) <= 0) throw Error("x0 must have r > 0 (the field has a pole at r = 0)");

  flow::Trajectory tr = flow::integrate(fs, x0, 0.0, span, rtol, atol);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    out = &file;
  }
  (*out) << fs.time_label << ",r,theta,v,w,H,F\n";
  char buf[64];
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", tr.times[i]);
    (*out) << buf;
    for (int j = 0; j < 4; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", tr.states[i](j));
      (*out) << "," << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", tr.monitor_values.at("H")[i]);
    (*out) << "," << buf;
    std::snprintf(buf, sizeof buf, "%.17g", tr.monitor_values.at("F")[i]);
    (*out) << "," << buf << "\n";
  }
  if (!tr.completed()) {
    std::cerr << "integration halted early ("
              << (tr.halt == flow::HaltReason::StepSizeUnderflow ? "step size underflow"
                                                                 : "non-finite state")
              << ") at " << fs.time_label << " = " << tr.times.back() << "\n";
    return kExitInconclusive;
  }
  return kExitOk;
}

int cmd_contact(bool reeb, const std::string& form_file, std::uint64_t seed,
                const std::string& out_path) {
  geo::FormFile f = geo::parse_form_file(read_file(form_file));
  if (f.form.degree() != 1) throw Error("contact commands need a one-form");
  json config{{"form_file", form_file}, {"seed", seed}};
  json report = base_report(reeb ? "contact reeb" : "contact check", config);

  contact::ContactCheck check = contact::is_b_contact(f.form, seed);
  report["contact"] = json{{"ok", check.ok},
                           {"volume_coeff", sym::render(check.volume_coeff)},
                           {"cleared_coeff", sym::render(check.cleared_coeff)},
                           {"samples_on_z", check.samples_on_z},
                           {"samples_off_z", check.samples_off_z}};
  if (!check.diagnostics.empty()) report["contact"]["diagnostics"] = check.diagnostics;
  if (!reeb) {
    emit(report, out_path);
    return check.ok ? kExitOk : kExitInconclusive;
  }
  if (!check.ok) {
    report["error"] = "not a b-contact form; no Reeb field";
    emit(report, out_path);
    return kExitInconclusive;
  }
  geo::VectorField r = contact::reeb_field(f.form);
  json comps = json::object();
  for (const std::string& v : f.chart.vars) {
    const sym::Expression c = r.component(v);
    if (!c.is_zero()) comps["d/d" + v] = sym::render(c);
  }
  report["reeb"] = comps;
  emit(report, out_path);
  return kExitOk;
}

int cmd_catalog_list() {
  std::printf("%-18s %-44s %s\n", "model", "parameters", "expected classification");
  for (const models::ModelSpec& s : models::list_models())
    std::printf("%-18s %-44s %s\n", s.name.c_str(), s.parameters.c_str(), s.expected.c_str());
  return kExitOk;
}

int cmd_verify(const std::string& filter, std::uint64_t seed) {
  const auto results = accept::run_acceptance(seed, filter);
  bool all_ok = true;
  for (const auto& r : results) {
    all_ok = all_ok && r.pass;
    std::printf("%-4s %2d %-20s %7.3fs  %s\n", r.pass ? "PASS" : "FAIL", r.index,
                r.name.c_str(), r.seconds, r.detail.c_str());
  }
  if (results.empty()) {
    std::printf("no criteria matched filter '%s'\n", filter.c_str());
    return kExitUsage;
  }
  std::printf("%s: %zu criteria (seed %llu)\n", all_ok ? "OK" : "FAILURES", results.size(),
              static_cast<unsigned long long>(seed));
  return all_ok ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singular symplectic structures toolkit"};
  app.require_subcommand(1);

  std::string model, form_file, alpha, gamma, var, hyper, point, out, grid, eps_list, csv, x0;
  std::string filter, time_label = "tau";
  std::uint64_t seed = sing::kDefaultSeed;
  int k = 1;
  double eps = 0.1, span = 10.0, rtol = 1e-10, atol = 1e-12;

  CLI::App* cat = app.add_subcommand("catalog", "browse the model catalog");
  cat->add_subcommand("list", "list models with parameters and expected classifications");

  CLI::App* cls = app.add_subcommand("classify", "singularity type of a 2-form along Z");
  cls->add_option("--model", model, "catalog model name");
  cls->add_option("--form-file", form_file, "form file (chart:/singular:/form: lines)");
  cls->add_option("--alpha", alpha, "potential exponent, rational p/q");
  cls->add_option("--gamma", gamma, "blow-up exponent, rational p/q");
  cls->add_option("--var", var, "coordinate defining Z = {var = 0} (symbolic method)");
  cls->add_option("--hypersurface", hyper, "defining function h with Z = {h = 0} (numeric fit)");
  cls->add_option("--point", point, "seed point on Z, e.g. \"u1=1,u2=1,p1=0.3,p2=-0.2\"");
  cls->add_option("--seed", seed, "sampling seed");
  cls->add_option("--out", out, "write the JSON report here instead of stdout");

  CLI::App* des = app.add_subcommand("desing", "f_eps-desingularization of a b^2k-form");
  des->add_option("--model", model, "catalog model name");
  des->add_option("--form-file", form_file, "form file");
  des->add_option("--alpha", alpha, "model parameter");
  des->add_option("--var", var, "defining coordinate of Z");
  des->add_option("--k", k, "half pole order (form must be b^2k)")->check(CLI::PositiveNumber);
  des->add_option("--eps", eps, "collar half width")->check(CLI::PositiveNumber);
  des->add_option("--grid", grid, "axes lo:hi:count[,...]; one spec applies to all axes");
  des->add_option("--eps-list", eps_list, "decreasing eps values for the convergence table");
  des->add_option("--csv", csv, "write per-point determinants to this CSV");
  des->add_option("--seed", seed, "sampling seed");
  des->add_option("--out", out, "write the JSON report here instead of stdout");

  CLI::App* integ = app.add_subcommand("integrate", "integrate the Hamiltonian flow");
  integ->add_option("--model", model, "model name (double-collision)")->required();
  integ->add_option("--alpha", alpha, "potential exponent");
  integ->add_option("--x0", x0, "initial state, e.g. \"r=1,theta=0,v=0.1,w=1\"")->required();
  integ->add_option("--tau", span, "time span (in the label given by --time)");
  integ->add_option("--time", time_label, "tau (primed flow, default) or t");
  integ->add_option("--rtol", rtol, "relative tolerance");
  integ->add_option("--atol", atol, "absolute tolerance");
  integ->add_option("--out", out, "write the CSV here instead of stdout");

  CLI::App* con = app.add_subcommand("contact", "b-contact condition and Reeb field");
  CLI::App* con_check = con->add_subcommand("check", "contact verdict with residual samples");
  con_check->add_option("--form-file", form_file, "one-form file")->required();
  con_check->add_option("--seed", seed, "sampling seed");
  con_check->add_option("--out", out, "write the JSON report here instead of stdout");
  CLI::App* con_reeb = con->add_subcommand("reeb", "Reeb field components");
  con_reeb->add_option("--form-file", form_file, "one-form file")->required();
  con_reeb->add_option("--seed", seed, "sampling seed");
  con_reeb->add_option("--out", out, "write the JSON report here instead of stdout");

  CLI::App* ver = app.add_subcommand("verify", "run every acceptance criterion");
  ver->add_option("--filter", filter, "only criteria whose name contains this");
  ver->add_option("--seed", seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cat->parsed()) return cmd_catalog_list();
    if (cls->parsed())
      return cmd_classify(model, form_file, alpha, gamma, var, hyper, point, seed, out);
    if (des->parsed())
      return cmd_desing(model, form_file, alpha, var, k, eps, grid, eps_list, csv, seed, out);
    if (integ->parsed())
      return cmd_integrate(model, alpha, x0, span, time_label, rtol, atol, out);
    if (con->parsed()) return cmd_contact(con_reeb->parsed(), form_file, seed, out);
    if (ver->parsed()) return cmd_verify(filter, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
