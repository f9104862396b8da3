#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <regex>
#include <sstream>

#include "monocluster/bounds.hpp"
#include "monocluster/error.hpp"
#include "monocluster/parallel.hpp"

namespace monocluster::cli {

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

json box_json(const MayerBox& b) { return {{"cell", b.cell.coords}, {"copy", b.copy}}; }

MayerBox box_from_json(const json& j) {
  return MayerBox{Cell{j.at("cell").get<std::vector<int>>()}, j.at("copy").get<int>()};
}

json series_json(const LambdaSeries& s) { return s.coefficients(); }

json config_json(const RunConfig& c) {
  json j;
  j["dim"] = c.dim;
  j["side"] = c.side;
  j["copies"] = c.copies;
  j["cells"] = c.cells;
  j["poly"] = c.poly;
  j["lambda"] = c.lambda;
  j["sources"] = c.sources;
  j["order"] = c.order;
  j["p_max"] = c.resolved_p_max();
  j["nodes_per_cell"] = c.nodes_per_cell;
  j["quad_order"] = c.quad_order;
  j["tolerance"] = c.tolerance;
  j["budget"] = c.budget;
  j["format"] = c.format;
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["radius"] = c.radius;
  j["step"] = c.step;
  j["graph_file"] = c.graph_file;
  j["h"] = c.h;
  j["lemma"] = c.lemma;
  j["trials"] = c.trials;
  j["samples"] = c.samples;
  return j;
}

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config file: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "dim") c.dim = v.get<int>();
      else if (key == "side") c.side = v.get<int>();
      else if (key == "copies") c.copies = v.get<int>();
      else if (key == "cells") c.cells = v.get<std::vector<std::vector<int>>>();
      else if (key == "poly") c.poly = v.is_string() ? parse_polynomial(v.get<std::string>()) : v.get<std::vector<double>>();
      else if (key == "lambda") c.lambda = v.get<double>();
      else if (key == "sources") c.sources = v.is_string() ? parse_points(v.get<std::string>()) : v.get<std::vector<Point>>();
      else if (key == "order") c.order = v.get<int>();
      else if (key == "p_max") c.p_max = v.get<int>();
      else if (key == "nodes_per_cell") c.nodes_per_cell = v.get<int>();
      else if (key == "quad_order") c.quad_order = v.get<int>();
      else if (key == "tolerance") c.tolerance = v.get<double>();
      else if (key == "budget") c.budget = v.get<double>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "radius") c.radius = v.get<double>();
      else if (key == "step") c.step = v.get<double>();
      else if (key == "graph_file") c.graph_file = v.get<std::string>();
      else if (key == "h") c.h = v.get<std::vector<double>>();
      else if (key == "lemma") c.lemma = v.get<std::string>();
      else if (key == "trials") c.trials = v.get<int>();
      else if (key == "samples") c.samples = v.get<int>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

// Writes newline-delimited records to the chosen stream.
class Emitter {
 public:
  Emitter(const RunConfig& c, std::ostream& fallback) {
    if (!c.output.empty()) {
      file_.open(c.output);
      if (!file_) throw ConfigError("cannot open output '" + c.output + "'");
      out_ = &file_;
    } else {
      out_ = &fallback;
    }
  }
  void record(const json& j) { *out_ << j.dump() << '\n'; }
  void line(const std::string& s) { *out_ << s << '\n'; }
  void flush() { out_->flush(); }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<double> random_decreasing(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> h(count);
  for (double& x : h) x = u(rng);
  std::sort(h.begin(), h.end(), std::greater<>());
  for (double& x : h) x = std::max(x, 1e-6);
  return h;
}

json graph_json(const ClusterGraph& g, std::size_t index) {
  json links = json::array();
  json kinds = json::array();
  for (int q = 1; q <= g.length(); ++q) {
    links.push_back({box_json(g.link(q).first), box_json(g.link(q).second)});
    kinds.push_back(to_string(g.kind(q)));
  }
  json sources = json::array();
  for (const MayerBox& b : g.sources().boxes()) sources.push_back(b.cell.coords);
  return {{"type", "graph"},     {"index", index},       {"p", g.length()},
          {"sources", sources},  {"links", links},       {"kinds", kinds},
          {"contributing", is_contributing(g)},
          {"final_size", g.final_stage().size()}};
}

ClusterGraph graph_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed graph file: ") + e.what());
    }
    if (j.value("type", "graph") != "graph") continue;
    try {
      std::vector<MayerBox> src;
      for (const auto& c : j.at("sources")) src.push_back({Cell{c.get<std::vector<int>>()}, 0});
      std::vector<Link> links;
      for (const auto& l : j.at("links")) links.push_back(Link::make(box_from_json(l.at(0)), box_from_json(l.at(1))));
      return ClusterGraph::from_links(Polymer::from_boxes(src), links);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad graph record: ") + e.what());
    }
  }
  throw ConfigError("graph file holds no graph record");
}

struct Outcome {
  bool pass = true;
  std::string reason;
};

Outcome cmd_kernel(const RunConfig& c, Emitter& emit) {
  const Kernel k = make_slice_kernel(c.dim, c.quad_order);
  const int steps = static_cast<int>(std::floor(c.radius / c.step + 1e-9));
  if (c.format == "csv") {
    std::string header;
    for (int i = 0; i < c.dim; ++i) header += "sep_" + std::to_string(i) + ",";
    emit.line(header + "value");
  } else {
    emit.record({{"type", "config"}, {"command", "kernel"}, {"config", config_json(c)}});
  }
  for (int i = 0; i <= steps; ++i) {
    Point sep(c.dim, 0.0);
    sep[0] = i * c.step;
    const double v = k.at(sep);
    if (c.format == "csv") {
      std::string row;
      for (double x : sep) row += number(x) + ",";
      emit.line(row + number(v));
    } else {
      emit.record({{"type", "kernel"}, {"sep", sep}, {"value", v}});
    }
  }
  return {};
}

Outcome cmd_enumerate(const RunConfig& c, Emitter& emit) {
  const DiscretizedModel m = c.model();
  emit.record({{"type", "config"}, {"command", "enumerate"}, {"config", config_json(c)}});
  std::size_t count = 0, contributing = 0;
  enumerate(m.window, m.source_polymer(), c.resolved_p_max(), [&](const ClusterGraph& g) {
    emit.record(graph_json(g, count++));
    contributing += is_contributing(g);
  });
  emit.record({{"type", "summary"}, {"graphs", count}, {"contributing", contributing}});
  return {};
}

Outcome cmd_matrix(const RunConfig& c, Emitter& emit) {
  if (c.graph_file.empty()) throw ConfigError("matrix needs --graph-file");
  const ClusterGraph g = graph_from_file(c.graph_file);
  const Window w = c.window();
  InterpolationMatrix m;
  if (static_cast<int>(c.h.size()) == g.length() + 1) {
    m = build_covint(g, HVector::from_h(c.h), matrix_support(g, w));
  } else if (static_cast<int>(c.h.size()) == g.length()) {
    m = restrict(g, HVector::from_h(c.h));
  } else {
    throw ConfigError("--hvals needs p + 1 values (M) or p values (restriction)");
  }
  const double min_eig = positivity_check(m);
  std::vector<std::string> labels;
  for (const MayerBox& b : m.support) labels.push_back(to_string(b));
  if (c.format == "csv") {
    std::string header = "box";
    for (const auto& l : labels) header += ",\"" + l + "\"";
    emit.line(header);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::string row = "\"" + labels[i] + "\"";
      for (std::size_t j = 0; j < labels.size(); ++j)
        row += "," + number(m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      emit.line(row);
    }
  } else {
    emit.record({{"type", "config"}, {"command", "matrix"}, {"config", config_json(c)}});
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
      std::vector<double> row(m.entries.cols());
      for (Eigen::Index j = 0; j < m.entries.cols(); ++j) row[j] = m.entries(i, j);
      rows.push_back(row);
    }
    emit.record({{"type", "matrix"}, {"support", labels}, {"entries", rows}, {"min_eigenvalue", min_eig}});
  }
  if (min_eig < -kTolPsd) return {false, "matrix is not positive semidefinite: " + number(min_eig)};
  return {};
}

Outcome cmd_verify_identity(const RunConfig& c, Emitter& emit) {
  const DiscretizedModel m = c.model();
  emit.record({{"type", "config"}, {"command", "verify-identity"}, {"config", config_json(c)}});
  const IdentityCheck r = expansion_identity_check(m, c.order, c.resolved_p_max());
  for (int k = 0; k <= c.order; ++k)
    emit.record({{"type", "coefficient"}, {"order", k}, {"lhs", r.lhs[k]}, {"rhs", r.rhs[k]}});
  const bool pass = r.deviation <= c.tolerance;
  emit.record({{"type", "result"},
               {"deviation", r.deviation},
               {"tolerance", c.tolerance},
               {"graphs", r.graphs},
               {"contributing", r.contributing},
               {"pass", pass}});
  if (!pass) return {false, "expansion identity deviation " + number(r.deviation)};
  return {};
}

Outcome cmd_schwinger(const RunConfig& c, Emitter& emit) {
  const DiscretizedModel m = c.model();
  emit.record({{"type", "config"}, {"command", "schwinger"}, {"config", config_json(c)}});
  const SchwingerResult r = schwinger(m, c.order, c.resolved_p_max());
  const bool pass = r.deviation <= c.tolerance;
  emit.record({{"type", "series"},
               {"coefficients", series_json(r.series)},
               {"direct", series_json(r.direct)},
               {"value", r.series.evaluate(c.lambda)},
               {"graphs", r.graphs},
               {"deviation", r.deviation},
               {"pass", pass}});
  if (!pass) return {false, "Schwinger series deviation " + number(r.deviation)};
  return {};
}

json constants_json(const BoundConstants& k, int n) {
  return {{"type", "constants"}, {"d", k.d}, {"m", k.m}, {"r1", k.r1}, {"r", k.r},
          {"C00", k.c00}, {"K1_near", k.K1_near}, {"K1_r", k.K1_r}, {"K2", k.K2},
          {"K3", k.K3}, {"K4", k.K4}, {"K5", k.K5}, {"K6", k.K6}, {"K_prime", k.K_prime},
          {"K_prime_envelope", k.K_prime_envelope}, {"K7", k.K7}, {"K8_n", k.K8(n)},
          {"K9", k.K9}, {"K10", k.K10}, {"K10_calibrated", k.K10_calibrated}};
}

json report_json(const CheckReport& r) {
  return {{"type", "check"}, {"name", r.name}, {"pass", r.pass}, {"worst_ratio", r.worst},
          {"witness", r.witness}, {"cases", r.cases}};
}

Outcome cmd_bounds(const RunConfig& c, Emitter& emit) {
  const DiscretizedModel m = c.model();
  emit.record({{"type", "config"}, {"command", "bounds"}, {"config", config_json(c)}});
  const int n = static_cast<int>(c.sources.size());
  const int p_max = c.resolved_p_max();
  std::mt19937_64 rng(c.seed);

  if (c.lemma == "9") {
    CheckReport rep{"simplex_integrals", true, 0.0, "", 0};
    for (int p = 1; p <= p_max; ++p) {
      for (unsigned mask = 0; mask < (1u << p); ++mask) {
        std::vector<int> J;
        for (int q = 1; q <= p; ++q)
          if (mask & (1u << (q - 1))) J.push_back(q);
        const SimplexIntegral s = simplex_integral_check(p, J);
        const double ratio = static_cast<double>(s.value) / s.bound;
        ++rep.cases;
        emit.record({{"type", "simplex"}, {"p", p}, {"J", J}, {"value", s.value.str()},
                     {"bound", s.bound}, {"ratio", ratio}});
        if (ratio > rep.worst) rep.worst = ratio;
        if (ratio > 1.0 && rep.pass) {
          rep.pass = false;
          rep.witness = "p=" + std::to_string(p) + " mask=" + std::to_string(mask);
        }
      }
    }
    emit.record(report_json(rep));
    return {rep.pass, rep.pass ? "" : "simplex integral exceeds e^p/alpha!"};
  }

  CalibrationFamily family;
  family.window = m.window;
  family.sources = m.source_polymer();
  family.p_max = p_max;
  family.h_samples = c.samples;
  family.seed = c.seed;
  const BoundConstants k = compute_constants(m.kernel, m.interaction, family);
  emit.record(constants_json(k, n));

  CheckReport rep;
  if (c.lemma == "4") {
    rep = {"parasite", true, 0.0, "", 0};
    for (int t = 0; t < c.trials; ++t) {
      std::uniform_int_distribution<int> pick(0, p_max);
      const ClusterGraph g = random_graph(m.window, m.source_polymer(), pick(rng), rng);
      const CheckReport one = parasite_bound_check(m, g, k.K3);
      ++rep.cases;
      rep.worst = std::max(rep.worst, one.worst);
      if (!one.pass && rep.pass) {
        rep.pass = false;
        rep.witness = one.witness;
      }
    }
  } else if (c.lemma == "5") {
    rep = {"row_sums", true, 0.0, "", 0};
    enumerate(m.window, m.source_polymer(), p_max, [&](const ClusterGraph& g) {
      if (!is_contributing(g)) return;
      for (int s = 0; s < c.samples; ++s) {
        const double v = row_sum_check(g, HVector::from_h(random_decreasing(g.length(), rng)));
        ++rep.cases;
        rep.worst = std::max(rep.worst, v);
        if (v > 1.0 + 1e-12 && rep.pass) {
          rep.pass = false;
          rep.witness = graph_json(g, 0).dump();
        }
      }
    });
  } else if (c.lemma == "6") {
    rep = local_factorial_check(m, k, p_max, c.trials, c.seed);
  } else if (c.lemma == "7") {
    rep = link_triple_check(m.window, m.source_polymer(), p_max);
  } else if (c.lemma == "8") {
    rep = volume_argument_check(m.window, m.source_polymer(), p_max, k);
    if (k.K_prime > k.K_prime_envelope) {
      rep.pass = false;
      rep.witness = "calibrated K' exceeds the analytic envelope";
    }
  } else if (c.lemma == "prop") {
    const double lambda = c.lambda > 0.0 ? c.lambda : k.coupling_for_ratio(0.5);
    const MajorantSums sums = majorant_sum(m.window, m.source_polymer(), n, p_max, lambda, k);
    rep = {"majorant", sums.dominated, 0.0, "", sums.terms.size()};
    for (double r : sums.ratios) {
      rep.worst = std::max(rep.worst, r);
      if (r > sums.geometric_ratio + 0.05) rep.pass = false;
    }
    emit.record({{"type", "majorant"}, {"lambda", lambda}, {"terms", sums.terms},
                 {"geometric", sums.geometric}, {"partial_sums", sums.partial},
                 {"ratios", sums.ratios}, {"geometric_ratio", sums.geometric_ratio},
                 {"dominated", sums.dominated}});
  } else {
    throw ConfigError("unknown lemma '" + c.lemma + "' (expected 4, 5, 6, 7, 8, 9 or prop)");
  }
  emit.record(report_json(rep));
  return {rep.pass, rep.pass ? "" : rep.name + " check failed " + rep.witness};
}

}  // namespace

std::vector<double> parse_polynomial(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ConfigError("empty polynomial");
  static const std::regex term(R"(([+-]?)(\d*\.?\d*(?:[eE][+-]?\d+)?)\*?(x(?:\^?(\d+))?)?)");
  std::vector<double> coeffs;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::smatch mt;
    const std::string rest = s.substr(pos);
    if (!std::regex_search(rest, mt, term, std::regex_constants::match_continuous) || mt.length(0) == 0)
      throw ConfigError("cannot parse polynomial '" + text + "'");
    const bool has_x = mt[3].matched;
    const std::string num = mt[2].str();
    if (num.empty() && !has_x) throw ConfigError("cannot parse polynomial '" + text + "'");
    double coef = num.empty() ? 1.0 : to_number(num);
    if (mt[1].str() == "-") coef = -coef;
    const int deg = has_x ? (mt[4].matched ? std::stoi(mt[4].str()) : 1) : 0;
    if (static_cast<int>(coeffs.size()) <= deg) coeffs.resize(deg + 1, 0.0);
    coeffs[deg] += coef;
    pos += static_cast<std::size_t>(mt.length(0));
  }
  return coeffs;
}

std::vector<Point> parse_points(const std::string& text) {
  std::vector<Point> pts;
  for (const std::string& item : split(text, ',')) {
    Point x;
    for (const std::string& coord : split(item, ':')) x.push_back(to_number(coord));
    pts.push_back(std::move(x));
  }
  return pts;
}

int RunConfig::resolved_p_max() const {
  if (p_max) return *p_max;
  const int degree = static_cast<int>(poly.size()) - 1;
  return (static_cast<int>(sources.size()) + std::max(degree, 0) * order) / 2;
}

Window RunConfig::window() const {
  if (cells.empty()) return Window::hypercube(dim, side, copies);
  std::vector<Cell> cs;
  for (const auto& c : cells) cs.push_back(Cell{c});
  return Window(cs, copies);
}

DiscretizedModel RunConfig::model() const {
  validate();
  DiscretizedModel m{window(), make_slice_kernel(dim, quad_order), nodes_per_cell,
                     Polynomial{poly}, lambda, sources, budget};
  m.validate();
  return m;
}

void RunConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (side < 1) throw ConfigError("side must be >= 1");
  if (copies < 0) throw ConfigError("copies must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (order < 0) throw ConfigError("order must be >= 0");
  if (resolved_p_max() < 0) throw ConfigError("p_max must be >= 0");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
  if (!(budget > 0.0)) throw ConfigError("budget must be > 0");
  if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
  if (nodes_per_cell < 1) throw ConfigError("nodes_per_cell must be >= 1");
  if (quad_order < 1) throw ConfigError("quad_order must be >= 1");
  if (!(radius > 0.0) || !(step > 0.0)) throw ConfigError("radius and step must be > 0");
  if (trials < 0 || samples < 1) throw ConfigError("trials must be >= 0 and samples >= 1");
  for (const Point& x : sources)
    if (static_cast<int>(x.size()) != dim) throw ConfigError("source dimension differs from dim");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster-graph expansion checks for a lattice boson model"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, poly, sources, h, manifest;
    RunConfig c;
    int p_max = 0;
  } f;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file; flags override it");
    sub->add_option("--dim", f.c.dim, "spatial dimension");
    sub->add_option("--side", f.c.side, "window side length in cells");
    sub->add_option("--copies", f.c.copies, "copy ceiling N");
    sub->add_option("--poly", f.poly, "interaction, e.g. x4 or 'x^4-0.5x^2'");
    sub->add_option("--lambda", f.c.lambda, "coupling");
    sub->add_option("--sources", f.sources, "source points, e.g. 0.5,1.5");
    sub->add_option("--order", f.c.order, "series order");
    sub->add_option("--p-max", f.p_max, "largest graph length");
    sub->add_option("--nodes-per-cell", f.c.nodes_per_cell, "quadrature nodes per cell");
    sub->add_option("--quad-order", f.c.quad_order, "kernel quadrature nodes per panel");
    sub->add_option("--tolerance", f.c.tolerance, "contract tolerance");
    sub->add_option("--budget", f.c.budget, "work budget in Wick pairings");
    sub->add_option("--format", f.c.format, "json or csv");
    sub->add_option("--output", f.c.output, "output file (default: standard output)");
    sub->add_option("--seed", f.c.seed, "random seed");
    sub->add_option("--manifest", f.manifest, "manifest path");
  };

  auto* kernel = app.add_subcommand("kernel", "tabulate the covariance kernel");
  add_common(kernel);
  kernel->add_option("--table", f.c.radius, "largest separation");
  kernel->add_option("--step", f.c.step, "separation step");
  auto* enumerate_cmd = app.add_subcommand("enumerate", "list cluster-graphs in the window");
  add_common(enumerate_cmd);
  auto* matrix = app.add_subcommand("matrix", "dump an interpolation matrix");
  add_common(matrix);
  matrix->add_option("--graph-file", f.c.graph_file, "graph record as written by enumerate");
  matrix->add_option("--hvals", f.h, "comma-separated h values");
  auto* verify = app.add_subcommand("verify-identity", "check the expansion identity");
  add_common(verify);
  auto* schwinger_cmd = app.add_subcommand("schwinger", "normalized Schwinger series");
  add_common(schwinger_cmd);
  auto* bounds = app.add_subcommand("bounds", "numeric checks of the estimates");
  add_common(bounds);
  bounds->add_option("--lemma", f.c.lemma, "4, 5, 6, 7, 8, 9 or prop");
  bounds->add_option("--trials", f.c.trials, "random trials");
  bounds->add_option("--samples", f.c.samples, "parameter samples per graph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  const auto start = std::chrono::steady_clock::now();
  RunConfig c;
  int status = 0;
  json failure;
  try {
    if (!f.config.empty()) apply_config_file(c, f.config);
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--dim")) c.dim = f.c.dim;
    if (given("--side")) c.side = f.c.side;
    if (given("--copies")) c.copies = f.c.copies;
    if (given("--poly")) c.poly = parse_polynomial(f.poly);
    if (given("--lambda")) c.lambda = f.c.lambda;
    if (given("--sources")) c.sources = parse_points(f.sources);
    if (given("--order")) c.order = f.c.order;
    if (given("--p-max")) c.p_max = f.p_max;
    if (given("--nodes-per-cell")) c.nodes_per_cell = f.c.nodes_per_cell;
    if (given("--quad-order")) c.quad_order = f.c.quad_order;
    if (given("--tolerance")) c.tolerance = f.c.tolerance;
    if (given("--budget")) c.budget = f.c.budget;
    if (given("--format")) c.format = f.c.format;
    if (given("--output")) c.output = f.c.output;
    if (given("--seed")) c.seed = f.c.seed;
    if (command == "kernel") {
      if (given("--table")) c.radius = f.c.radius;
      if (given("--step")) c.step = f.c.step;
      if (!given("--format") && f.config.empty()) c.format = "csv";
    }
    if (command == "matrix") {
      if (given("--graph-file")) c.graph_file = f.c.graph_file;
      if (given("--hvals")) {
        c.h.clear();
        for (const std::string& s : split(f.h, ',')) c.h.push_back(to_number(s));
      }
    }
    if (command == "bounds") {
      if (given("--lemma")) c.lemma = f.c.lemma;
      if (given("--trials")) c.trials = f.c.trials;
      if (given("--samples")) c.samples = f.c.samples;
    }
    c.validate();

    Emitter emit(c, out);
    Outcome outcome;
    if (command == "kernel") outcome = cmd_kernel(c, emit);
    else if (command == "enumerate") outcome = cmd_enumerate(c, emit);
    else if (command == "matrix") outcome = cmd_matrix(c, emit);
    else if (command == "verify-identity") outcome = cmd_verify_identity(c, emit);
    else if (command == "schwinger") outcome = cmd_schwinger(c, emit);
    else outcome = cmd_bounds(c, emit);
    if (!outcome.pass) {
      status = 1;
      failure = {{"type", "failure"}, {"kind", "contract"}, {"reason", outcome.reason}};
      if (c.format == "json") emit.record(failure);
    }
    emit.flush();
  } catch (const ConfigError& e) {
    status = 2;
    failure = {{"type", "failure"}, {"kind", "config"}, {"reason", e.what()}};
  } catch (const BudgetExceeded& e) {
    status = 2;
    failure = {{"type", "failure"}, {"kind", "budget"}, {"reason", e.what()}};
  } catch (const std::exception& e) {
    status = 1;
    failure = {{"type", "failure"}, {"kind", "contract"}, {"reason", e.what()}};
  }
  if (status != 0) err << failure.dump() << '\n';

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string manifest_path = f.manifest;
  if (manifest_path.empty())
    manifest_path = c.output.empty() ? "monocluster-" + command + ".manifest.json"
                                     : c.output + ".manifest.json";
  json manifest = {{"command", command},
                   {"config", config_json(c)},
                   {"version", kVersion},
                   {"exit_status", status},
                   {"timings", {{"total_seconds", seconds}}},
                   {"threads", thread_count()}};
  if (!failure.is_null()) manifest["failure"] = failure;
  std::ofstream m(manifest_path);
  if (m) m << manifest.dump(2) << '\n';
  return status;
}

}  // namespace monocluster::cli
