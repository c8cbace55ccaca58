#include "rigidlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "rigidlab/experiments.hpp"
#include "rigidlab/records.hpp"

namespace rigidlab {

namespace {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string> kCommands = {
    "classify", "closure", "kernel", "count-ext", "check-events", "estimate", "concentration",
    "rigid-rate", "census", "e1-bound", "fit", "agree", "sample", "plot-data"};

struct RunConfig {
  std::string command;
  std::string alpha_text;
  std::optional<std::uint32_t> v_max, e_max;
  std::size_t ell = 3;
  std::string n_text;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string formula;
  std::string pair_path;
  std::string graph_path;
  std::string set_text;
  std::string map_text;
  std::string out_path;
  std::string input_path;
  std::size_t round_cap = 0;
  unsigned threads = 1;
  std::optional<double> eps;
  std::size_t budget = 0;
  std::size_t embeddings = 1;
  double max_work = 1e10;
};

std::pair<std::int64_t, std::int64_t> parse_alpha(const std::string& text) {
  static const std::regex re(R"(\s*(\d+)\s*/\s*(\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re))
    throw ConfigError("--alpha must be written num/den with integers, got '" + text + "'");
  try {
    return {std::stoll(m[1].str()), std::stoll(m[2].str())};
  } catch (const std::out_of_range&) {
    throw ConfigError("--alpha components out of range");
  }
}

std::vector<std::size_t> parse_ns(const std::string& text) {
  std::vector<std::size_t> ns;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (item.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad --n entry '" + item + "'");
    const std::size_t n = std::stoull(item);
    if (n < 1) throw ConfigError("--n entries must be positive");
    ns.push_back(n);
  }
  return ns;
}

Embedding parse_map(const std::string& text) {
  Embedding f;
  std::stringstream ss(text);
  std::string item;
  static const std::regex re(R"(\s*(\d+)\s*:\s*(\d+)\s*)");
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(item, m, re))
      throw ConfigError("--map entries are template:ambient, got '" + item + "'");
    f.set(static_cast<Vertex>(std::stoul(m[1].str())), static_cast<Vertex>(std::stoul(m[2].str())));
  }
  return f;
}

PairSpec load_pair(const std::string& path) {
  if (path.empty()) throw ConfigError("--pair is required for this command");
  const GraphText gt = read_graph_file(path);
  const VertexSet* h0 = gt.find("h0");
  const VertexSet* h1 = gt.find("h1");
  if (!h0 || !h1) throw ConfigError("pair file " + path + " lacks h0/h1 header tokens");
  return PairSpec{gt.graph, *h0, *h1};
}

Graph load_graph(const std::string& path) {
  if (path.empty()) throw ConfigError("--graph is required for this command");
  return read_graph_file(path).graph;
}

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  void run() {
    const std::string& c = cfg_.command;
    if (c == "plot-data") return plot_data();
    if (c == "fit") return fit();
    prepare();
    if (c == "sample") return sample();
    emit(config_record());
    if (c == "classify") classify();
    else if (c == "closure") closure_cmd();
    else if (c == "kernel") kernel();
    else if (c == "count-ext") count_ext();
    else if (c == "check-events") check_events();
    else if (c == "estimate") estimate();
    else if (c == "concentration") concentration();
    else if (c == "rigid-rate") rigid_rate();
    else if (c == "census") census();
    else if (c == "e1-bound") e1();
    else if (c == "agree") agree();
  }

 private:
  void emit(const Record& r) { out_ << r.dump() << '\n'; }
  void emit(const std::vector<Record>& rs) {
    for (const auto& r : rs) emit(r);
  }

  // Loads inputs, then validates alpha over a window sized for them.
  void prepare() {
    const std::string& c = cfg_.command;
    if (c == "classify" || c == "concentration" || c == "rigid-rate" || c == "count-ext")
      pair_ = load_pair(cfg_.pair_path);
    if (c == "closure" || c == "count-ext" || (!cfg_.graph_path.empty() &&
                                              (c == "kernel" || c == "check-events" ||
                                               c == "sample")))
      graph_ = load_graph(cfg_.graph_path);
    if (c == "estimate" || c == "agree") {
      require(!cfg_.formula.empty(), "--formula is required for " + c);
      formula_ = parse_formula(cfg_.formula);
    }
    ns_ = parse_ns(cfg_.n_text);
    const bool needs_n = c == "kernel" ? !graph_ : c == "check-events" ? !graph_
                                     : c != "classify" && c != "closure" && c != "count-ext";
    require(!needs_n || !ns_.empty(), "--n is required for " + c);
    require(cfg_.trials >= 1 || c == "concentration" || c == "census",
            "--trials must be positive");
    require(cfg_.ell >= 1, "--ell must be positive");

    std::size_t q_size = 0;
    if (pair_) q_size = pair_->ambient.q_set().size();
    if (graph_) q_size = std::max(q_size, graph_->q_set().size());
    if (!cfg_.set_text.empty() && c == "check-events")
      q_size = std::max(q_size, VertexSet::parse(cfg_.set_text).size());

    const auto [num, den] = parse_alpha(cfg_.alpha_text);
    require(num > 0 && num < den, "--alpha must lie strictly between 0 and 1");
    const auto ell = static_cast<std::uint32_t>(cfg_.ell);
    AlphaParam def = default_alpha(num, den, ell, q_size);
    if (cfg_.v_max || cfg_.e_max)
      def = validate_alpha(num, den, cfg_.v_max.value_or(def.v_max), cfg_.e_max.value_or(def.e_max));
    alpha_ = def;
    eps_ = cfg_.eps.value_or(alpha_.zeta().to_double() / 4.0);
  }

  Record config_record() const {
    Record r;
    r["experiment"] = "config";
    r["command"] = cfg_.command;
    r["alpha_num"] = alpha_.num;
    r["alpha_den"] = alpha_.den;
    r["v_max"] = alpha_.v_max;
    r["e_max"] = alpha_.e_max;
    r["zeta"] = alpha_.zeta().to_string();
    r["zeta_value"] = alpha_.zeta().to_double();
    r["zeta_at"] = to_json(alpha_.zeta_at);
    r["ell_star"] = cfg_.ell;
    Record ns = Record::array();
    for (auto n : ns_) ns.push_back(n);
    r["n"] = std::move(ns);
    r["trials"] = cfg_.trials;
    r["seed"] = cfg_.seed;
    r["formula"] = formula_ ? formula_->to_string() : std::string();
    r["pair"] = cfg_.pair_path;
    r["graph"] = cfg_.graph_path;
    r["set"] = cfg_.set_text;
    r["round_cap"] = cfg_.round_cap;
    r["eps"] = eps_;
    r["budget"] = cfg_.budget;
    r["embeddings"] = cfg_.embeddings;
    r["max_work"] = cfg_.max_work;
    return r;
  }

  RecordContext ctx(const std::string& experiment) const {
    return RecordContext{experiment, alpha_, cfg_.ell, cfg_.seed};
  }

  ExperimentOptions options() const { return ExperimentOptions{cfg_.threads, cfg_.max_work}; }

  void classify() { emit(classification_record(*pair_, classify_pair(*pair_, alpha_))); }

  void closure_cmd() {
    const VertexSet x = VertexSet::parse(cfg_.set_text);
    const KernelResult kr = closure(*graph_, x, cfg_.ell, alpha_, cfg_.round_cap);
    emit(closure_record(ctx("closure"), graph_->order(), x, kr));
  }

  void kernel() {
    if (graph_) {
      KernelTrial t;
      t.n = graph_->order();
      t.result = rigid_kernel(*graph_, cfg_.ell, alpha_, cfg_.round_cap);
      t.chain = extract_rigid_chain(*graph_, t.result, cfg_.ell, alpha_);
      emit(kernel_record(ctx("kernel"), t));
      return;
    }
    for (std::size_t n : ns_) {
      for (const KernelTrial& t :
           kernel_trials(alpha_, cfg_.ell, n, cfg_.trials, cfg_.seed, options(), cfg_.round_cap))
        emit(kernel_record(ctx("kernel"), t));
    }
  }

  void count_ext() {
    const Embedding f = parse_map(cfg_.map_text);
    Record r;
    r["experiment"] = "count-ext";
    r["n"] = graph_->order();
    r["h0"] = to_json(pair_->h0);
    r["h1"] = to_json(pair_->h1);
    r["map"] = cfg_.map_text;
    r["type"] = to_json(ext_type(*pair_));
    r["count"] = count_extensions(*graph_, f, *pair_);
    emit(r);
  }

  void check_events_on(const Graph& g, std::uint64_t event_seed) {
    const EventReport none = check_no_rigid_from_base(g, cfg_.ell, alpha_);
    emit(event_record(ctx("check-events"), g.order(), none));
    const EventReport generic = check_generic_ext(g, cfg_.ell, alpha_, cfg_.budget, event_seed);
    emit(event_record(ctx("check-events"), g.order(), generic));
  }

  void check_events() {
    if (graph_) {
      Graph g = *graph_;
      if (!cfg_.set_text.empty()) g = g.with_q(VertexSet::parse(cfg_.set_text));
      check_events_on(g, derive_seed(cfg_.seed, g.order(), 0, kEventStream));
      return;
    }
    const VertexSet q = VertexSet::parse(cfg_.set_text);
    for (std::size_t n : ns_) {
      for (std::size_t t = 0; t < cfg_.trials; ++t) {
        Graph g = sample_graph(SampleConfig{n, alpha_, std::nullopt, cfg_.seed, t});
        if (!q.empty()) g = g.with_q(q);
        check_events_on(g, derive_seed(cfg_.seed, n, t, kEventStream));
      }
    }
  }

  void estimate() {
    const ProbCurve curve =
        estimate_prob(*formula_, alpha_, ns_, cfg_.trials, cfg_.seed, options());
    emit(curve_records(ctx("estimate"), curve));
  }

  void concentration() {
    const ConcReport rep = concentration_report(*pair_, alpha_, ns_, cfg_.trials,
                                                cfg_.embeddings, eps_, cfg_.seed, options());
    emit(concentration_records(ctx("concentration"), rep));
  }

  void rigid_rate() {
    for (std::size_t n : ns_)
      emit(rigid_rate_record(ctx("rigid-rate"),
                             rigid_hit_rate(*pair_, alpha_, n, cfg_.trials, cfg_.seed, options())));
  }

  void census() {
    const KernelCensus kc = kernel_census(alpha_, cfg_.ell, ns_, cfg_.trials, eps_, cfg_.seed,
                                          options(), cfg_.budget);
    emit(census_records(ctx("census"), kc));
  }

  void e1() {
    const double zeta = alpha_.zeta().to_double();
    for (std::size_t n : ns_)
      emit(e1_record(static_cast<double>(n), eps_, cfg_.ell, zeta,
                     e1_bound(static_cast<double>(n), eps_, cfg_.ell, zeta)));
  }

  void agree() {
    for (std::size_t n : ns_)
      emit(agreement_record(ctx("agree"), agreement_experiment(*formula_, alpha_, cfg_.ell, n,
                                                               cfg_.trials, cfg_.seed, options())));
  }

  // Graph text, one block per trial, each preceded by a comment line.
  void sample() {
    std::optional<QSpec> q;
    if (graph_) q = QSpec{graph_->q_set(), graph_->q_edges()};
    for (std::size_t n : ns_) {
      for (std::size_t t = 0; t < cfg_.trials; ++t) {
        const SampleConfig sc{n, alpha_, q, cfg_.seed, t};
        out_ << "# alpha " << alpha_.num << '/' << alpha_.den << " seed " << cfg_.seed
             << " trial " << t << '\n';
        write_graph(out_, q ? sample_conditioned(sc) : sample_graph(sc));
      }
    }
  }

  std::ifstream open_input() const {
    require(!cfg_.input_path.empty(), "--input is required for " + cfg_.command);
    std::ifstream in(cfg_.input_path);
    if (!in) throw ConfigError("cannot open " + cfg_.input_path);
    return in;
  }

  void fit() {
    std::ifstream in = open_input();
    const ProbCurve curve = curve_from_records(in);
    alpha_.num = curve.alpha.num;
    alpha_.den = curve.alpha.den;
    RecordContext c = ctx("fit");
    c.seed = curve.master_seed;
    Record r = fit_record(c, fit_decay(curve));
    r["alpha_num"] = curve.alpha.num;
    r["alpha_den"] = curve.alpha.den;
    r["formula"] = curve.formula_text;
    r["points"] = curve.points.size();
    emit(r);
  }

  // Two-column "x y" series per experiment, separated by "# <experiment>" lines.
  void plot_data() {
    std::ifstream in = open_input();
    static const std::map<std::string, std::string> y_field = {
        {"estimate", "rate"},        {"concentration", "fraction"},
        {"census", "e1_frequency"},  {"rigid-rate", "rate"},
        {"e1-bound", "log_expected"}, {"agree", "agreement"}};
    std::string line, current;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const Record r = Record::parse(line);
      if (!r.is_object() || !r.contains("experiment") || !r.contains("n")) continue;
      const auto it = y_field.find(r["experiment"].get<std::string>());
      if (it == y_field.end() || !r.contains(it->second)) continue;
      if (it->first != current) {
        current = it->first;
        out_ << "# " << current << " n " << it->second << '\n';
      }
      out_ << r["n"].dump() << ' ' << r[it->second].dump() << '\n';
    }
  }

  const RunConfig& cfg_;
  std::ostream& out_;
  AlphaParam alpha_;
  double eps_ = 0.0;
  std::vector<std::size_t> ns_;
  std::optional<PairSpec> pair_;
  std::optional<Graph> graph_;
  std::optional<Formula> formula_;
};

unsigned default_threads() {
  if (const char* env = std::getenv("RIGIDLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.threads = default_threads();
  CLI::App app{"Extension-calculus laboratory for G(n, n^-alpha)", "rigidlab"};
  app.set_config("--config", "", "key=value configuration file (flags override it)");
  app.add_option("command", cfg.command, "subcommand")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--alpha", cfg.alpha_text, "exponent alpha as num/den");
  app.add_option("--vmax", cfg.v_max, "certificate window v_max");
  app.add_option("--emax", cfg.e_max, "certificate window e_max");
  app.add_option("--ell", cfg.ell, "extension size bound ell*");
  app.add_option("--n", cfg.n_text, "comma-separated vertex counts");
  app.add_option("--trials", cfg.trials, "trials per n");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--formula", cfg.formula, "first-order sentence");
  app.add_option("--pair", cfg.pair_path, "pair template file");
  app.add_option("--graph", cfg.graph_path, "graph file");
  app.add_option("--set", cfg.set_text, "vertex set, comma-separated");
  app.add_option("--map", cfg.map_text, "embedding as template:ambient pairs");
  app.add_option("--out", cfg.out_path, "output file (default stdout)");
  app.add_option("--input", cfg.input_path, "JSON-lines input for fit and plot-data");
  app.add_option("--round-cap", cfg.round_cap, "closure round cap (0 = n)");
  app.add_option("--threads", cfg.threads, "worker threads (default RIGIDLAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--eps", cfg.eps, "band or threshold exponent (default zeta/4)");
  app.add_option("--budget", cfg.budget, "generic-extension sample budget");
  app.add_option("--embeddings", cfg.embeddings, "embeddings per sampled graph");
  app.add_option("--max-work", cfg.max_work, "largest n^qdepth per evaluation");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const bool needs_alpha = cfg.command != "fit" && cfg.command != "plot-data";
  if (needs_alpha && cfg.alpha_text.empty()) {
    err << "error: --alpha is required\n";
    return kExitConfig;
  }

  std::ostringstream buffer;
  try {
    Runner(cfg, buffer).run();
  } catch (const WindowHitError& e) {
    err << "error: " << e.what() << '\n';
    return kExitWindowHit;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  }

  if (cfg.out_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(cfg.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << cfg.out_path << '\n';
      return kExitConfig;
    }
    file << buffer.str();
  }
  return kExitOk;
}

}  // namespace rigidlab
