#include "loctriv/driver.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "loctriv/complex.hpp"
#include "loctriv/hamiltonian.hpp"
#include "loctriv/io.hpp"
#include "loctriv/localize.hpp"
#include "loctriv/random.hpp"
#include "loctriv/synth.hpp"
#include "loctriv/tolerances.hpp"
#include "loctriv/verify.hpp"

namespace loctriv {

double EnsembleReport::failure_fraction(int n) const {
  if (trials.empty()) return 0;
  int fails = 0;
  for (const auto& t : trials) fails += !t.clustered && t.residual >= 0.01 * n;
  return static_cast<double>(fails) / trials.size();
}

double EnsembleReport::max_removed_fraction(int n) const {
  double worst = 0;
  for (const auto& t : trials) worst = std::max(worst, static_cast<double>(t.removed_loop_vertices) / n);
  return worst;
}

EnsembleReport ensemble_experiment(int n, int d, int r, int trials, int maxC, int restarts, std::uint64_t seed,
                                   int jobs) {
  EnsembleReport rep;
  rep.trials.resize(trials);
  parallel_for(trials, jobs, [&](int k) {
    EnsembleTrial& t = rep.trials[k];
    t.seed = seed + k;
    auto s = sample_counterexample_graph({n, d, r, t.seed});
    t.vertices = s.e.vertex_count();
    t.removed_loop_vertices = s.removed_loop_vertices;
    Graph e2 = power(s.e, 2);
    t.triangles = count_triangles(e2);
    auto search = search_triangle_free_clustering(e2, maxC, restarts, splitmix64(t.seed));
    t.clustered = search.success;
    t.residual = search.residual_triangles;
  });
  return rep;
}

namespace {

class Report {
 public:
  explicit Report(const ExperimentConfig& c) : c_(c) {}
  void row(const std::string& line) { rows_.push_back(line); }
  template <class T>
  void set(const std::string& key, const T& v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    kv_.emplace_back(key, os.str());
  }
  void print(std::ostream& out) const {
    for (const auto& r : rows_) out << r << "\n";
    out << "[report]\n";
    out << "command=" << c_.command << "\nseed=" << c_.seed << "\n";
    out << "param_n=" << c_.n << "\nparam_d=" << c_.d << "\nparam_r=" << c_.r << "\nparam_R=" << c_.R
        << "\nparam_l=" << c_.l << "\nparam_epsilon=" << c_.epsilon << "\nparam_maxC=" << c_.maxC
        << "\nparam_depth=" << c_.depth << "\nparam_trials=" << c_.trials << "\njobs=" << c_.jobs << "\n";
    for (const auto& [k, v] : kv_) out << k << "=" << v << "\n";
    out << tolerance_report();
  }

 private:
  const ExperimentConfig& c_;
  std::vector<std::string> rows_;
  std::vector<std::pair<std::string, std::string>> kv_;
};

void need(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

LocalizationMap default_map(const CommutingHamiltonian& h) {
  return cluster_map(interaction_complex(h), Clustering::singletons(h.site_count()));
}

LocalizationMap load_map(const ExperimentConfig& c, const CommutingHamiltonian& h) {
  return c.map.empty() ? default_map(h) : read_map(read_text_file(c.map));
}

void save(const std::string& path, const std::string& text, Report& rep, const std::string& key) {
  if (path.empty()) return;
  write_text_file(path, text);
  rep.set(key, path);
}

long register_space(const Circuit& c) {
  long total = 1;
  for (const auto& r : c.registers) {
    if (total > (1L << 22) / r.dim) return -1;
    total *= r.dim;
  }
  return total;
}

// Energy of h on the circuit output: tableau when both are stabilizer,
// else the state vector when it fits. Returns false when neither applies.
bool circuit_energy(const CommutingHamiltonian& h, const Circuit& c, Report& rep, double* energy) {
  if (h.is_stabilizer() && c.all_clifford()) {
    auto e = tableau_energy(h, c);
    rep.set("energy_method", "tableau");
    rep.set("energy", e.energy);
    rep.set("energy_density", e.density);
    *energy = e.energy;
    return true;
  }
  if (register_space(c) > 0) {
    auto e = statevector_energy(h, c);
    rep.set("energy_method", "statevector");
    rep.set("energy", e.energy);
    rep.set("energy_density", e.density);
    *energy = e.energy;
    return true;
  }
  rep.set("energy_method", "none");
  return false;
}

void circuit_stats(const Circuit& c, Report& rep) {
  rep.set("depth", c.depth());
  rep.set("gates", c.gate_count());
  rep.set("registers", c.register_count());
  rep.set("ancillas", c.register_count() - c.real_count());
  rep.set("max_gate_width", c.max_gate_width());
  rep.set("clifford", c.all_clifford() ? "yes" : "no");
}

int cmd_girth(const ExperimentConfig& c, Report& rep) {
  Graph g = read_graph(read_text_file(c.input));
  auto gi = girth(g);
  rep.row(gi ? std::to_string(*gi) : "inf");
  rep.set("girth", gi ? std::to_string(*gi) : "inf");
  rep.set("vertices", g.vertex_count());
  rep.set("edges", g.edge_count());
  return 0;
}

int cmd_ensemble(const ExperimentConfig& c, Report& rep) {
  auto e = ensemble_experiment(c.n, c.d, c.r, c.trials, c.maxC, c.restarts, c.seed, c.jobs);
  rep.row("seed vertices removed_loop removed_frac triangles_E2 residual residual_frac clustered");
  for (const auto& t : e.trials) {
    std::ostringstream os;
    os << t.seed << " " << t.vertices << " " << t.removed_loop_vertices << " " << std::setprecision(4)
       << static_cast<double>(t.removed_loop_vertices) / c.n << " " << t.triangles << " " << t.residual << " "
       << static_cast<double>(t.residual) / c.n << " " << (t.clustered ? "yes" : "no");
    rep.row(os.str());
  }
  rep.set("failure_fraction", e.failure_fraction(c.n));
  rep.set("max_removed_fraction", e.max_removed_fraction(c.n));
  rep.set("restarts", c.restarts);
  return 0;
}

int cmd_cluster_search(const ExperimentConfig& c, Report& rep) {
  Graph g = power(read_graph(read_text_file(c.input)), c.R);
  auto s = search_triangle_free_clustering(g, c.maxC, c.restarts, c.seed, c.jobs);
  rep.row(s.success ? "success" : "failure");
  rep.set("success", s.success ? "yes" : "no");
  rep.set("residual_triangles", s.residual_triangles);
  rep.set("clusters", s.best.clusters.size());
  rep.set("restarts_used", s.restarts_used);
  save(c.output, write_clustering(s.best), rep, "clustering_file");
  return s.success ? 0 : 1;
}

int cmd_localize(const ExperimentConfig& c, Report& rep) {
  Graph g = read_graph(read_text_file(c.input));
  auto m = collapse_high_girth_power(g, c.R);
  auto good = verify_good(m);
  auto dist = check_distortion(m, good.metrics);
  for (const auto& v : good.violations) rep.row("violation " + v);
  rep.row(good.good ? "good" : "not good");
  rep.set("good", good.good ? "yes" : "no");
  rep.set("l_max", good.metrics.l_max);
  rep.set("D_1", good.metrics.D_1);
  rep.set("max_preimage_diameter_0cell", good.metrics.max_preimage_diameter_0cell);
  rep.set("max_preimage_diameter_1cell", good.metrics.max_preimage_diameter_1cell);
  rep.set("distortion_holds", dist.holds ? "yes" : "no");
  rep.set("distortion_pairs", dist.pairs_checked);
  save(c.output, write_map(m), rep, "map_file");
  return good.good && dist.holds ? 0 : 1;
}

int cmd_cluster_map(const ExperimentConfig& c, Report& rep) {
  auto h = read_hamiltonian(read_text_file(c.input));
  Clustering cl = c.sets.empty() ? Clustering::singletons(h.site_count()) : read_clustering(read_text_file(c.sets));
  auto m = cluster_map(interaction_complex(h), cl);
  auto good = verify_good(m);
  rep.row(good.good ? "good" : "not good");
  rep.set("good", good.good ? "yes" : "no");
  rep.set("target_vertices", m.target.vertex_count());
  rep.set("first_betti", first_betti(m.target));
  save(c.output, write_map(m), rep, "map_file");
  return 0;
}

int cmd_instance(const ExperimentConfig& c, Report& rep) {
  CommutingHamiltonian h;
  std::optional<LocalizationMap> m;
  if (c.instance == "ring-zz") {
    need(c.n >= 3, "ring-zz needs --n >= 3");
    h = ring_zz(c.n);
    m = default_map(h);
  } else if (c.instance == "toric") {
    need(c.L >= 2, "toric needs --L >= 2");
    h = toric_code(c.L, c.hole);
    if (c.hole > 0) m = punctured_toric_map(c.L, c.hole);
  } else if (c.instance == "wen") {
    need(c.L >= 2, "wen needs --L >= 2");
    h = wen_plaquette(c.L);
  } else if (c.instance == "cluster-ring") {
    need(c.n >= 7, "cluster-ring needs --n >= 7");
    h = CommutingHamiltonian::qubits(c.n);
    for (int i = 0; i < c.n; ++i)
      h.add(Term::stabilizer_projector({(i + c.n - 1) % c.n, i, (i + 1) % c.n}, PauliString::parse("ZXZ")));
    m = collapse_high_girth_power(cycle_graph(c.n), 2);
  } else if (c.instance == "planted") {
    need(c.n >= 2, "planted needs --n >= 2");
    h = planted_two_body(cycle_graph(std::max(3, c.n)), c.d, 1L << 12, c.seed);
  } else {
    throw std::invalid_argument("unknown instance '" + c.instance + "' (ring-zz, toric, wen, cluster-ring, planted)");
  }
  rep.row(c.instance + " sites " + std::to_string(h.site_count()) + " terms " + std::to_string(h.terms.size()));
  rep.set("sites", h.site_count());
  rep.set("terms", h.terms.size());
  save(c.output, write_hamiltonian(h), rep, "hamiltonian_file");
  if (m) save(c.map, write_map(*m), rep, "map_file");
  return 0;
}

int cmd_two_body(const ExperimentConfig& c, Report& rep) {
  auto h = read_hamiltonian(read_text_file(c.input));
  auto r = solve_two_body(h, c.seed);
  circuit_stats(r.circuit, rep);
  rep.set("label_search", r.exhaustive ? "exhaustive" : "heuristic");
  rep.set("model_energy", r.energy);
  double e = 0;
  circuit_energy(h, r.circuit, rep, &e);
  rep.row("energy " + std::to_string(r.energy));
  save(c.output, write_circuit(r.circuit), rep, "circuit_file");
  return 0;
}

int cmd_stab_solve(const ExperimentConfig& c, Report& rep) {
  auto h = read_hamiltonian(read_text_file(c.input));
  auto r = stabilizer_cut_solve(h, load_map(c, h));
  circuit_stats(r.circuit, rep);
  rep.set("cuts", r.cuts);
  double e = 0;
  circuit_energy(h, r.circuit, rep, &e);
  std::ostringstream os;
  os << "energy " << e;
  rep.row(os.str());
  save(c.output, write_circuit(r.circuit), rep, "circuit_file");
  return e == 0 ? 0 : 1;
}

int cmd_tree_reduce(const ExperimentConfig& c, Report& rep) {
  auto h = read_hamiltonian(read_text_file(c.input));
  auto r = tree_reduce_solve(h, load_map(c, h), c.seed);
  circuit_stats(r.circuit, rep);
  rep.set("steps", r.steps.size());
  rep.set("l_max", r.l_max);
  double e = 0;
  bool known = circuit_energy(h, r.circuit, rep, &e);
  rep.row(known ? "energy " + std::to_string(e) : "energy unverified");
  save(c.output, write_circuit(r.circuit), rep, "circuit_file");
  return !known || std::abs(e) <= kEigenTol ? 0 : 1;
}

int cmd_hypercube(const ExperimentConfig& c, Report& rep) {
  auto h = read_hamiltonian(read_text_file(c.input));
  auto r = hypercube_partition(h, c.D, c.L, c.l);
  rep.set("dropped", r.dropped_count);
  rep.set("blocks", r.block_count);
  circuit_stats(r.circuit, rep);
  double e = 0;
  circuit_energy(h, r.circuit, rep, &e);
  rep.row("dropped " + std::to_string(r.dropped_count) + " of " + std::to_string(h.terms.size()));
  save(c.output, write_circuit(r.circuit), rep, "circuit_file");
  return 0;
}

int cmd_hyperfinite(const ExperimentConfig& c, Report& rep) {
  ComplexFamily family;
  if (c.instance == "torus") {
    need(c.n >= 3, "torus family needs --n >= 3");
    family = [n = c.n](int, std::mt19937_64&) { return triangulated_torus(n, n); };
  } else if (c.instance == "ensemble") {
    family = [c](int trial, std::mt19937_64&) {
      auto s = sample_counterexample_graph({c.n, c.d, c.r, c.seed + static_cast<std::uint64_t>(trial)});
      return attach_triangles(power(s.e, 2));
    };
  } else {
    throw std::invalid_argument("hyperfinite needs --instance torus or ensemble");
  }
  auto h = hyperfinite_experiment(family, c.epsilon, c.R, c.trials, c.seed, c.restarts, c.jobs);
  rep.row("trial cells removed residual_two_cells success");
  for (std::size_t k = 0; k < h.trials.size(); ++k) {
    const auto& t = h.trials[k];
    rep.row(std::to_string(k) + " " + std::to_string(t.cells) + " " + std::to_string(t.removed) + " " +
            std::to_string(t.residual_two_cells) + " " + (t.success ? "yes" : "no"));
  }
  rep.set("success_rate", h.success_rate());
  return 0;
}

int cmd_shields(const ExperimentConfig& c, Report& rep) {
  auto k = read_complex(read_text_file(c.input));
  need(!c.X.empty(), "shields needs --X");
  auto s = shields(k, c.X);
  for (const auto& sh : s) {
    std::string line = "shield";
    for (const auto& [a, b] : sh.pairs) line += " (" + std::to_string(a) + "," + std::to_string(b) + ")";
    rep.row(line);
  }
  rep.set("shields", s.size());
  return 0;
}

int cmd_cover(const ExperimentConfig& c, Report& rep) {
  auto k = read_complex(read_text_file(c.input));
  need(!c.sets.empty(), "cover needs --sets");
  auto sets = read_clustering(read_text_file(c.sets)).clusters;
  auto loc = check_set_localizable(k, sets, c.R);
  for (const auto& v : loc.violations) rep.row("violation " + v);
  auto cov = build_cover(k, sets, c.depth);
  rep.set("set_localizable", loc.ok ? "yes" : "no");
  rep.set("cover_cells", cov.complex.zero_cell_count());
  rep.set("cover_paths", cov.paths.size());
  rep.row("cover " + std::to_string(cov.complex.zero_cell_count()) + " cells");
  save(c.output, write_complex(cov.complex), rep, "complex_file");
  return 0;
}

int cmd_verify(const ExperimentConfig& c, Report& rep) {
  auto h = read_hamiltonian(read_text_file(c.input));
  need(!c.circuit.empty(), "verify needs --circuit");
  auto circ = read_circuit(read_text_file(c.circuit));
  circuit_stats(circ, rep);
  if (h.is_stabilizer() && circ.all_clifford()) {
    auto t = tableau_energy(h, circ);
    rep.set("tableau_energy", t.energy);
  }
  if (register_space(circ) > 0) {
    auto s = statevector_energy(h, circ);
    rep.set("statevector_energy", s.energy);
    rep.set("energy_density", s.density);
  }
  if (h.hilbert_dimension() <= kMaxExactDim) rep.set("exact_ground_energy", exact_ground_energy(h, c.seed));
  double e = 0;
  bool known = circuit_energy(h, circ, rep, &e);
  rep.row(known ? "energy " + std::to_string(e) : "energy unverified");
  return 0;
}

int cmd_roundtrip(const ExperimentConfig& c, Report& rep) {
  std::string text = read_text_file(c.input);
  FileKind kind = c.kind == "auto" ? detect_kind(text) : parse_kind(c.kind);
  bool ok = roundtrip_text(text, kind);
  rep.row(ok ? "roundtrip ok" : "roundtrip mismatch");
  rep.set("roundtrip", ok ? "ok" : "mismatch");
  return ok ? 0 : 1;
}

const std::map<std::string, std::function<int(const ExperimentConfig&, Report&)>>& commands() {
  static const std::map<std::string, std::function<int(const ExperimentConfig&, Report&)>> table = {
      {"girth", cmd_girth},
      {"ensemble", cmd_ensemble},
      {"cluster-search", cmd_cluster_search},
      {"localize", cmd_localize},
      {"cluster-map", cmd_cluster_map},
      {"instance", cmd_instance},
      {"two-body", cmd_two_body},
      {"stab-solve", cmd_stab_solve},
      {"tree-reduce", cmd_tree_reduce},
      {"hypercube", cmd_hypercube},
      {"hyperfinite", cmd_hyperfinite},
      {"shields", cmd_shields},
      {"cover", cmd_cover},
      {"verify", cmd_verify},
      {"roundtrip", cmd_roundtrip},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : commands()) v.push_back(k);
    return v;
  }();
  return names;
}

void validate_config(const ExperimentConfig& c) {
  if (!commands().count(c.command)) throw std::invalid_argument("unknown command '" + c.command + "'");
  static const std::vector<std::string> needs_input = {"girth",       "cluster-search", "localize", "cluster-map",
                                                       "two-body",    "stab-solve",     "tree-reduce", "hypercube",
                                                       "shields",     "cover",          "verify",   "roundtrip"};
  if (std::find(needs_input.begin(), needs_input.end(), c.command) != needs_input.end() && c.input.empty())
    throw std::invalid_argument(c.command + " needs --input");
  need(c.jobs >= 1, "--jobs must be >= 1");
  need(c.trials >= 1, "--trials must be >= 1");
  need(c.restarts >= 1, "--restarts must be >= 1");
  need(c.R >= 1, "--R must be >= 1");
  need(c.maxC >= 1, "--maxC must be >= 1");
  need(c.depth >= 0, "--depth must be >= 0");
  need(c.epsilon >= 0 && c.epsilon < 1, "--epsilon must lie in [0, 1)");
  if (c.command == "ensemble") {
    EnsembleParams{c.n, c.d, c.r, c.seed}.validate();
  }
  if (c.command == "hypercube") {
    need(c.L >= 1 && c.l >= 1 && c.D >= 1, "hypercube needs --D, --L and --l >= 1");
  }
}

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate_config(c);
    Report rep(c);
    int status = commands().at(c.command)(c, rep);
    rep.print(out);
    return status;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const UnsupportedRegime& e) {
    err << "unsupported: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace loctriv
