#include "pdscatter/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdscatter/asymptotics.hpp"
#include "pdscatter/errors.hpp"
#include "pdscatter/estimators.hpp"
#include "pdscatter/maxbias.hpp"
#include "pdscatter/simlab.hpp"
#include "pdscatter/weights.hpp"

namespace pdscatter {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::optional<double> to_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  std::istringstream in(cell);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail() || !in.eof()) return std::nullopt;
  return v;
}

double parse_real(const std::string& text, const std::string& what) {
  const auto v = to_number(trim(text));
  if (!v) throw ParseError("cannot read " + what + " from '" + text + "'");
  return *v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& cell : split_cells(text)) out.push_back(parse_real(cell, what));
  return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

std::string fmt(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << v;
  return s.str();
}

struct WeightFlags {
  double cutoff = 0.3229;
  double steepness = 2.0;
  std::string form = "quadratic";

  void attach(CLI::App* app) {
    app->add_option("--C", cutoff, "Weight cutoff C in (0, 1)")->capture_default_str();
    app->add_option("--K", steepness, "Weight steepness K > 0")->capture_default_str();
    app->add_option("--form", form, "Inner polynomial of the weight")
        ->check(CLI::IsMember({"quadratic", "power"}))
        ->capture_default_str();
  }
  WeightSpec spec(int order) const {
    WeightSpec w{order, cutoff, steepness, form == "power" ? WeightForm::PowerBase : WeightForm::QuadraticBase};
    validate(w);
    return w;
  }
};

struct MethodFlags {
  std::string method = "auto";
  bool no_refine = false;
  int directions = 1000;
  int refine_steps = 20;
  int mad_k = 1;

  void attach(CLI::App* app) {
    app->add_option("--method", method, "Depth method")
        ->check(CLI::IsMember({"auto", "exact1d", "candidate2d", "sampled"}))
        ->capture_default_str();
    app->add_flag("--no-refine", no_refine, "Skip the local refinement of Candidate2D");
    app->add_option("--directions", directions, "Direction count of the sampled method")->capture_default_str();
    app->add_option("--refine-steps", refine_steps, "Refinement steps of the sampled method")->capture_default_str();
    app->add_option("--mad-k", mad_k, "k of MAD_k")->capture_default_str();
  }
  DepthMethod resolve(int d, const std::optional<std::uint64_t>& seed) const {
    DepthMethod m;
    if (method == "auto") {
      m = default_method(d, seed.value_or(1));
      if (auto* c = std::get_if<Candidate2D>(&m)) c->refine = !no_refine;
    } else if (method == "exact1d") {
      m = Exact1D{};
    } else if (method == "candidate2d") {
      m = Candidate2D{!no_refine};
    } else {
      m = Sampled{directions, refine_steps, seed.value_or(1)};
    }
    if (auto* s = std::get_if<Sampled>(&m)) {
      if (!seed) throw DomainError("the sampled depth method is randomized; pass --seed");
      s->count = directions;
      s->refine_steps = refine_steps;
      if (directions < 1 || refine_steps < 0) throw DomainError("--directions must be >= 1, --refine-steps >= 0");
    }
    return m;
  }
};

std::string method_name(const DepthMethod& m) {
  if (std::holds_alternative<Exact1D>(m)) return "exact1d";
  if (const auto* c = std::get_if<Candidate2D>(&m)) return c->refine ? "candidate2d" : "candidate2d-norefine";
  return "sampled";
}

std::optional<std::uint64_t> seed_of(const CLI::Option* opt, std::uint64_t value) {
  if (opt->count() == 0) return std::nullopt;
  return value;
}

}  // namespace

DataMatrix parse_dataset(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  std::size_t width = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> values;
    values.reserve(cells.size());
    bool numeric = true;
    for (const auto& c : cells) {
      const auto v = to_number(c);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!seen_first) {
      seen_first = true;
      width = cells.size();
      if (!numeric) continue;
    }
    if (cells.size() != width) {
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(width),
                       line_no);
    }
    if (!numeric) throw ParseError("non-numeric cell", line_no);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DomainError("dataset has no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return DataMatrix(std::move(m));
}

DataMatrix read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_dataset(in);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts(1);
  for (char ch : text) {
    if (ch == ':') {
      parts.emplace_back();
    } else {
      parts.back() += ch;
    }
  }
  if (parts.size() != 3) throw ParseError("grid must read start:stop:step, got '" + text + "'");
  const double a = parse_real(parts[0], "grid start");
  const double b = parse_real(parts[1], "grid stop");
  const double s = parse_real(parts[2], "grid step");
  if (!(s > 0.0) || !(b >= a)) throw DomainError("grid needs step > 0 and stop >= start");
  const auto count = static_cast<long>(std::floor((b - a) / s + 1e-9)) + 1;
  if (count > 1000000) throw DomainError("grid has more than 10^6 points");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * s);
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projection-depth-weighted location and scatter estimation"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Depth-weighted location and scatter of a dataset");
  std::string est_input;
  WeightFlags est_w;
  MethodFlags est_m;
  std::uint64_t est_seed_value = 0;
  estimate->add_option("--input", est_input, "CSV dataset")->required();
  est_w.attach(estimate);
  est_m.attach(estimate);
  auto* est_seed = estimate->add_option("--seed", est_seed_value, "Seed of the sampled method");

  // depth
  auto* depth = app.add_subcommand("depth", "Projection depth of points with respect to a dataset");
  std::string depth_input;
  std::string depth_points;
  MethodFlags depth_m;
  std::uint64_t depth_seed_value = 0;
  depth->add_option("--input", depth_input, "CSV dataset")->required();
  depth->add_option("--points", depth_points, "CSV of query points (default: the dataset rows)");
  depth_m.attach(depth);
  auto* depth_seed = depth->add_option("--seed", depth_seed_value, "Seed of the sampled method");

  // are
  auto* are = app.add_subcommand("are", "Asymptotic constants and relative efficiency at the normal model");
  int are_dim = 2;
  double are_kappa = 0.0;
  WeightFlags are_w;
  are->add_option("--dim", are_dim, "Dimension d")->required();
  are->add_option("--kappa", are_kappa, "Kurtosis parameter")->capture_default_str();
  are_w.attach(are);

  // g2
  auto* g2 = app.add_subcommand("g2", "Gross-error sensitivity index of the shape component");
  int g2_dim = 2;
  WeightFlags g2_w;
  g2->add_option("--dim", g2_dim, "Dimension d")->required();
  g2_w.attach(g2);

  // influence
  auto* influence = app.add_subcommand("influence", "Influence kernel t1(r), t2(r) as CSV");
  int inf_dim = 2;
  std::string inf_grid;
  WeightFlags inf_w;
  influence->add_option("--dim", inf_dim, "Dimension d")->required();
  influence->add_option("--r-grid", inf_grid, "Radius grid start:stop:step")->required();
  inf_w.attach(influence);

  // maxbias
  auto* maxbias = app.add_subcommand("maxbias", "Maximum-bias index curve as CSV");
  int mb_dim = 2;
  std::string mb_grid;
  int mb_points = 48;
  bool mb_mad = false;
  WeightFlags mb_w;
  maxbias->add_option("--dim", mb_dim, "Dimension d")->required();
  maxbias->add_option("--eps-grid", mb_grid, "Contamination grid start:stop:step")->required();
  maxbias->add_option("--grid", mb_points, "Radius grid size of the supremum search")->capture_default_str();
  maxbias->add_flag("--mad", mb_mad, "Add the MAD maximum-bias column");
  mb_w.attach(maxbias);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo of the sphericity statistic");
  SimConfig sim;
  std::string sim_outlier = "100,0";
  std::string sim_shape = "point";
  WeightFlags sim_w;
  MethodFlags sim_m;
  std::string sim_csv;
  simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
  simulate->add_option("--d", sim.d, "Dimension")->capture_default_str();
  simulate->add_option("--eps", sim.eps, "Contamination fraction")->capture_default_str();
  simulate->add_option("--reps", sim.replicates, "Replicates")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Base seed")->required();
  simulate->add_option("--outlier", sim_outlier, "Contamination point, comma separated")->capture_default_str();
  simulate->add_option("--shape", sim_shape, "Outliers exactly at the point or N(point, I)")
      ->check(CLI::IsMember({"point", "shifted"}))
      ->capture_default_str();
  simulate->add_flag("--fixed-count", sim.fixed_count, "Exactly round(eps n) outliers per replicate");
  simulate->add_option("--replicates-csv", sim_csv, "Write per-replicate phi0 values to this CSV file");
  sim_w.attach(simulate);
  sim_m.attach(simulate);

  // breakdown
  auto* breakdown = app.add_subcommand("breakdown", "Replacement breakdown point, theoretical and probed");
  int bd_n = 0;
  int bd_d = 0;
  int bd_k = 1;
  bool bd_probe = false;
  std::string bd_input;
  WeightFlags bd_w;
  MethodFlags bd_m;
  std::uint64_t bd_seed_value = 0;
  auto* bd_n_opt = breakdown->add_option("--n", bd_n, "Sample size");
  auto* bd_d_opt = breakdown->add_option("--d", bd_d, "Dimension");
  breakdown->add_option("--k", bd_k, "k of MAD_k")->capture_default_str();
  breakdown->add_flag("--probe", bd_probe, "Probe the dataset with adversarial replacements");
  breakdown->add_option("--input", bd_input, "CSV dataset for the probe");
  bd_w.attach(breakdown);
  bd_m.attach(breakdown);
  auto* bd_seed = breakdown->add_option("--seed", bd_seed_value, "Seed of the sampled method");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    Json j;
    j["error"] = "parse";
    j["message"] = e.what();
    err << j.dump() << "\n";
    return 2;
  }

  try {
    if (estimate->parsed()) {
      const DataMatrix data = read_dataset(est_input);
      const DepthMethod method = est_m.resolve(data.d(), seed_of(est_seed, est_seed_value));
      const auto est = pws_fit(data, est_m.mad_k, method, est_w.spec(1), est_w.spec(2));
      Json j;
      j["n"] = data.n();
      j["d"] = data.d();
      j["method"] = method_name(method);
      j["location"] = vector_json(est.location);
      j["scatter"] = matrix_json(est.scatter);
      j["depths"] = est.depths;
      j["weights1"] = est.weights1;
      j["weights2"] = est.weights2;
      emit_json(out, j);
    } else if (depth->parsed()) {
      const DataMatrix data = read_dataset(depth_input);
      const DepthMethod method = depth_m.resolve(data.d(), seed_of(depth_seed, depth_seed_value));
      std::vector<double> depths;
      if (depth_points.empty()) {
        depths = projection_depths(data, depth_m.mad_k, method);
      } else {
        const DataMatrix points = read_dataset(depth_points);
        if (points.d() != data.d()) throw DomainError("query points and dataset differ in dimension");
        depths = projection_depths(points.rows(), data, depth_m.mad_k, method);
      }
      Json j;
      j["method"] = method_name(method);
      j["depths"] = depths;
      emit_json(out, j);
    } else if (are->parsed()) {
      const auto c = asymptotic_constants(are_dim, are_w.spec(2));
      Json j;
      j["d"] = are_dim;
      j["C"] = are_w.cutoff;
      j["K"] = are_w.steepness;
      j["kappa"] = are_kappa;
      j["c0"] = c.c0;
      j["c1"] = c.c1;
      j["c2"] = c.c2;
      j["c3"] = c.c3;
      j["sigma1"] = c.sigma1;
      j["sigma2"] = c.sigma2;
      j["are"] = are_shape(c, are_kappa);
      j["centering_residual"] = centering_residual(c);
      emit_json(out, j);
    } else if (g2->parsed()) {
      out << fmt(g2_index(g2_dim, g2_w.spec(2))) << "\n";
    } else if (influence->parsed()) {
      const auto c = asymptotic_constants(inf_dim, inf_w.spec(2));
      out << "r,t1,t2\n";
      for (double r : parse_grid(inf_grid)) {
        if (r < 0.0) throw DomainError("radius must be non-negative");
        const auto t = t_funcs(r, c);
        out << fmt(r) << "," << fmt(t.t1) << "," << fmt(t.t2) << "\n";
      }
    } else if (maxbias->parsed()) {
      const auto eps = parse_grid(mb_grid);
      if (mb_points < 4) throw DomainError("--grid must be at least 4");
      const auto model = EllipticalModel::standard(mb_dim);
      MaxBiasEngine engine(mb_dim, mb_w.spec(1), mb_w.spec(2));
      const auto curve = mbi_curve(eps, model, engine, mb_points);
      std::optional<BiasCurve> mad;
      if (mb_mad) mad = mad_bias_curve(eps, model.law);
      out << (mb_mad ? "eps,mbi,mad\n" : "eps,mbi\n");
      for (std::size_t i = 0; i < curve.points.size(); ++i) {
        out << fmt(curve.points[i].first) << "," << fmt(curve.points[i].second);
        if (mad) out << "," << fmt(mad->points[i].second);
        out << "\n";
      }
    } else if (simulate->parsed()) {
      const auto pt = parse_list(sim_outlier, "outlier coordinate");
      sim.outlier = Eigen::Map<const Eigen::VectorXd>(pt.data(), static_cast<Eigen::Index>(pt.size()));
      sim.shape = sim_shape == "shifted" ? ContaminationShape::Shifted : ContaminationShape::PointMass;
      sim.k = sim_m.mad_k;
      sim.method = sim_m.resolve(sim.d, sim.seed);
      sim.w1 = sim_w.spec(1);
      sim.w2 = sim_w.spec(2);
      const auto r = table3_run(sim);
      Json cfg;
      cfg["n"] = sim.n;
      cfg["d"] = sim.d;
      cfg["eps"] = sim.eps;
      cfg["outlier"] = vector_json(sim.outlier);
      cfg["shape"] = sim_shape;
      cfg["replicates"] = sim.replicates;
      cfg["seed"] = sim.seed;
      cfg["k"] = sim.k;
      cfg["method"] = method_name(sim.method);
      cfg["C"] = sim_w.cutoff;
      cfg["K"] = sim_w.steepness;
      cfg["fixed_count"] = sim.fixed_count;
      Json j;
      j["config"] = cfg;
      j["lrt_pws"] = r.lrt_pws;
      j["lrt_cov"] = r.lrt_cov;
      j["llrt_pws"] = optional_json(r.llrt_pws);
      j["llrt_cov"] = optional_json(r.llrt_cov);
      j["re"] = optional_json(r.re);
      j["replicate_count"] = r.replicate_count;
      if (!sim_csv.empty()) {
        std::ofstream csv(sim_csv);
        if (!csv) throw ParseError("cannot write '" + sim_csv + "'");
        csv << "replicate,phi0_pws,phi0_cov\n";
        for (std::size_t i = 0; i < r.phi0_pws.size(); ++i) {
          csv << i << "," << fmt(r.phi0_pws[i]) << "," << fmt(r.phi0_cov[i]) << "\n";
        }
      }
      j["warnings"] = r.warnings;
      emit_json(out, j);
    } else if (breakdown->parsed()) {
      std::optional<DataMatrix> data;
      if (bd_probe) {
        if (bd_input.empty()) throw DomainError("--probe needs --input");
        data = read_dataset(bd_input);
        if (bd_n_opt->count() && bd_n != data->n()) throw DomainError("--n does not match the dataset");
        if (bd_d_opt->count() && bd_d != data->d()) throw DomainError("--d does not match the dataset");
        bd_n = data->n();
        bd_d = data->d();
      } else if (!bd_n_opt->count() || !bd_d_opt->count()) {
        throw DomainError("breakdown needs --n and --d (or --probe --input)");
      }
      Json j;
      j["n"] = bd_n;
      j["d"] = bd_d;
      j["k"] = bd_k;
      j["theoretical"] = rbp_theoretical(bd_n, bd_d, bd_k).str();
      j["affine_bound"] = affine_rbp_bound(bd_n, bd_d).str();
      if (data) {
        const DepthMethod method = bd_m.resolve(bd_d, seed_of(bd_seed, bd_seed_value));
        const auto probe = rbp_probe(*data, bd_k, method, bd_w.spec(1), bd_w.spec(2));
        j["empirical"] = probe.empirical.str();
        j["family"] = probe.family ? Json(adversary_name(*probe.family)) : Json(nullptr);
        j["log"] = probe.log;
      }
      emit_json(out, j);
    }
  } catch (const Error& e) {
    Json j;
    j["error"] = e.kind();
    j["message"] = e.what();
    if (const auto* p = dynamic_cast<const ParseError*>(&e); p && p->line() > 0) j["line"] = p->line();
    err << j.dump() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    Json j;
    j["error"] = "internal";
    j["message"] = e.what();
    err << j.dump() << "\n";
    return 5;
  }
  return 0;
}

}  // namespace pdscatter
