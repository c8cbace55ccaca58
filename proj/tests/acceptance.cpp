#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rigidlab/cli.hpp"
#include "rigidlab/experiments.hpp"

using namespace rigidlab;

namespace {

const char* kK4 =
    "exists a. exists b. exists c. exists d. (R(a,b) & R(a,c) & R(a,d) & R(b,c) & R(b,d) & "
    "R(c,d))";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double log_binom(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome classification_equivalence() {
  std::mt19937_64 rng(1001);
  std::size_t checked = 0, mismatches = 0;
  for (auto [num, den] : {std::pair{79L, 100L}, std::pair{701L, 1000L}}) {
    std::mt19937_64 trng(rng());
    for (int rep = 0; rep < 200; ++rep) {
      std::uniform_real_distribution<double> pd(0.15, 0.95);
      const VertexSet q = rep % 4 == 0 ? VertexSet{6} : VertexSet{};
      const Graph t = oracle::random_graph(6, pd(trng), trng, q);
      const AlphaParam a = default_alpha(num, den, 3, q.size());
      for (unsigned m1 = 0; m1 < 64; ++m1) {
        for (unsigned m0 = m1;; m0 = (m0 - 1) & m1) {
          std::vector<Vertex> h0, h1;
          for (Vertex v = 1; v <= 6; ++v) {
            if (m0 >> (v - 1) & 1U) h0.push_back(v);
            if (m1 >> (v - 1) & 1U) h1.push_back(v);
          }
          const PairSpec p{t, VertexSet(h0), VertexSet(h1)};
          const Classification c = classify_pair(p, a);
          const oracle::NaiveClass o = oracle::naive_classify(p, num, den);
          ++checked;
          if (c.ext_type.v != o.v || c.ext_type.e != o.e || c.dense != o.dense ||
              c.sparse != o.sparse || c.safe != o.safe || c.rigid != o.rigid ||
              c.hinged != o.hinged)
            ++mismatches;
          if (m0 == 0) break;
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(checked) + " pairs, " + std::to_string(mismatches) +
                               " mismatches"};
}

Outcome zeta_exactness() {
  const AlphaParam a = validate_alpha(79, 100, 8, 28);
  const auto o = oracle::exhaustive_zeta(79, 100, 8, 28);
  const bool ok = a.zeta() == Rational::make(5, 100) && a.zeta_at == ExtType{4, 5} &&
                  a.zeta_scaled == o.gap && static_cast<long>(a.zeta_at.v) == o.v &&
                  static_cast<long>(a.zeta_at.e) == o.e;
  return {ok, "zeta = " + a.zeta().to_string() + " at (" + std::to_string(a.zeta_at.v) + "," +
                  std::to_string(a.zeta_at.e) + "), oracle gap " + std::to_string(o.gap) + "/100 at (" +
                  std::to_string(o.v) + "," + std::to_string(o.e) + ")"};
}

Outcome extension_count_oracle() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<int> nd(4, 9), kd(1, 4);
  std::uniform_real_distribution<double> pd(0.2, 0.9);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const bool with_q = rep % 3 == 0;
    const std::size_t k = static_cast<std::size_t>(kd(rng));
    const std::size_t tn = k + (with_q ? 1 : 0);
    const std::size_t n = std::max(tn, static_cast<std::size_t>(nd(rng)));
    const VertexSet q = with_q ? VertexSet{1} : VertexSet{};
    const Graph g = oracle::random_graph(n, pd(rng), rng, q);
    const Graph t = oracle::random_graph(tn, pd(rng), rng, q);
    std::vector<Vertex> h1;
    for (Vertex v = with_q ? 2 : 1; v <= tn; ++v) h1.push_back(v);
    const std::size_t h0_size = static_cast<std::size_t>(rng() % (h1.size() + 1));
    std::vector<Vertex> h0(h1.begin(), h1.begin() + static_cast<std::ptrdiff_t>(h0_size));
    std::vector<Vertex> targets;
    for (Vertex v = 1; v <= n; ++v)
      if (!g.in_q(v)) targets.push_back(v);
    std::shuffle(targets.begin(), targets.end(), rng);
    Embedding f;
    for (std::size_t i = 0; i < h0.size(); ++i) f.set(h0[i], targets[i]);
    const PairSpec p{t, VertexSet(h0), VertexSet(h1)};
    if (count_extensions(g, f, p) != oracle::brute_count(g, f, p)) ++mismatches;
  }
  return {mismatches == 0, "1000 instances, " + std::to_string(mismatches) + " mismatches"};
}

Outcome closed_form_probability() {
  const AlphaParam a = default_alpha(701, 1000, 3);
  const std::vector<std::size_t> ns{4, 5, 6, 8};
  const std::size_t trials = 100000;
  const ProbCurve c = estimate_prob(parse_formula("exists x. exists y. R(x,y)"), a, ns, trials, 4004);
  bool ok = true;
  double worst = 0;
  for (const ProbPoint& pt : c.points) {
    const double n = static_cast<double>(pt.n);
    const double p = 1 - std::pow(1 - std::pow(n, -0.701), n * (n - 1) / 2);
    const double sigma = std::sqrt(p * (1 - p) / trials);
    const double z = std::abs(pt.rate() - p) / sigma;
    worst = std::max(worst, z);
    ok = ok && z <= 3;
  }
  return {ok, "largest deviation " + fmt("%.2f", worst) + " sigma"};
}

Outcome stretched_regime() {
  ProbCurve c;
  for (std::size_t n = 16; n <= 4096; n *= 2) {
    const double nd = static_cast<double>(n);
    ProbPoint pt;
    pt.n = n;
    pt.exact_log_p = nd * (nd - 1) / 2 * std::log1p(-std::pow(nd, -0.701));
    c.points.push_back(pt);
  }
  const DecayFit fit = fit_decay(c);
  const bool ok = fit.model == DecayModel::stretched_exponential && std::abs(fit.eps - 1.299) <= 0.1;
  return {ok, "model " + to_string(fit.model) + ", eps = " + fmt("%.4f", fit.eps)};
}

Outcome polynomial_regime() {
  const AlphaParam a = default_alpha(79, 100, 3);
  const std::size_t trials = 20000;
  const ProbCurve c = estimate_prob(parse_formula(kK4), a, {30, 60, 120, 240}, trials, 6006);
  bool dominated = true;
  std::string rates;
  for (const ProbPoint& pt : c.points) {
    const double n = static_cast<double>(pt.n);
    const double bound = std::exp(log_binom(n, 4) + 6 * std::log(std::pow(n, -0.79)));
    const double b = std::min(bound, 1.0);
    const double sigma = std::sqrt(b * (1 - b) / trials);
    dominated = dominated && pt.rate() <= bound + 4 * sigma;
    rates += fmt(" %.5f", pt.rate()) + fmt("/%.5f", bound);
  }
  const DecayFit fit = fit_decay(c);
  const bool ok = fit.model == DecayModel::polynomial && dominated && fit.beta >= 0.5 &&
                  fit.beta <= 1.0;
  return {ok, "model " + to_string(fit.model) + ", beta = " + fmt("%.3f", fit.beta) +
                  ", rate/bound" + rates};
}

Outcome kernel_structure() {
  const std::vector<KernelTrial> plain = kernel_trials(default_alpha(79, 100, 3), 3, 200, 500, 7007);
  std::size_t nonempty = 0;
  for (const KernelTrial& t : plain) nonempty += !t.result.kernel.empty() || t.result.truncated;
  const VertexSet k4{1, 2, 3, 4};
  const GraphSource planted = [&](const SampleConfig& cfg) {
    return with_planted(sample_graph(cfg), clique_edges(k4));
  };
  const std::vector<KernelTrial> with_k4 =
      kernel_trials(default_alpha(79, 100, 4), 4, 200, 200, 7008, {}, 0, planted);
  std::size_t contained = 0;
  for (const KernelTrial& t : with_k4)
    contained += std::includes(t.result.kernel.begin(), t.result.kernel.end(), k4.begin(), k4.end());
  return {nonempty == 0 && contained == with_k4.size(),
          std::to_string(nonempty) + "/500 nonempty at ell*=3, planted K4 contained in " +
              std::to_string(contained) + "/" + std::to_string(with_k4.size())};
}

Outcome kernel_sentence_link() {
  const AgreementReport r =
      agreement_experiment(parse_formula(kK4), default_alpha(79, 100, 4), 4, 200, 1000, 8008);
  const bool ok = r.empty_kernel_trials > 0 && r.empty_kernel_true == 0;
  return {ok, std::to_string(r.empty_kernel_trials) + " empty-kernel trials, " +
                  std::to_string(r.empty_kernel_true) + " with K4 true; " +
                  std::to_string(r.excluded) + " truncated"};
}

Outcome concentration_trend() {
  const PairSpec edge{build_graph(2, {{1, 2}}), VertexSet{1}, VertexSet{1, 2}};
  const ConcReport r =
      concentration_report(edge, default_alpha(79, 100, 3), {500, 8000}, 100, 100, 0.15, 9009);
  const ConcPoint& small = r.points[0];
  const ConcPoint& large = r.points[1];
  const bool ok = small.embeddings == 10000 && large.embeddings == 10000 &&
                  large.fraction < small.fraction && large.fraction <= 0.10;
  return {ok, "fraction " + fmt("%.4f", small.fraction) + " at n=500, " +
                  fmt("%.4f", large.fraction) + " at n=8000"};
}

Outcome fitter_calibration() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> beta_d(0.3, 1.5), u_d(0.05, 0.9), eps_d(0.1, 0.6),
      c_d(0.2, 2.0);
  const std::vector<double> ns{50, 100, 200, 400, 800, 1600};
  std::size_t correct = 0;
  double worst = 0;
  auto run = [&](const std::function<double(double)>& log_p, DecayModel expect, double exponent) {
    std::vector<DecayPoint> pts;
    for (double n : ns) {
      const double lp = log_p(n);
      pts.push_back({n, lp, kExactSigma * std::max(1.0, std::abs(lp))});
    }
    const DecayFit fit = fit_decay_points(pts);
    const double got = expect == DecayModel::polynomial ? fit.beta : fit.eps;
    const double rel = std::abs(got - exponent) / exponent;
    worst = std::max(worst, rel);
    correct += fit.model == expect && rel <= 0.05;
  };
  for (int i = 0; i < 50; ++i) {
    const double beta = beta_d(rng), u = u_d(rng);
    run([&](double n) { return std::log(u) - beta * std::log(n / 50); }, DecayModel::polynomial,
        beta);
  }
  for (int i = 0; i < 50; ++i) {
    const double eps = eps_d(rng), c = c_d(rng);
    run([&](double n) { return -c * std::pow(n, eps); }, DecayModel::stretched_exponential, eps);
  }
  return {correct == 100, std::to_string(correct) + "/100 correct, worst exponent error " +
                              fmt("%.2e", worst)};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> runs{
      {"kernel", "--alpha", "79/100", "--ell", "4", "--n", "100,200", "--trials", "40", "--seed", "11"},
      {"estimate", "--alpha", "79/100", "--n", "30,60", "--trials", "2000", "--seed", "12",
       "--formula", kK4},
      {"census", "--alpha", "79/100", "--ell", "4", "--n", "100", "--trials", "40", "--seed", "13",
       "--budget", "20"},
      {"concentration", "--alpha", "79/100", "--n", "500", "--trials", "20", "--embeddings", "20",
       "--seed", "14", "--eps", "0.15", "--pair", ""},
      {"agree", "--alpha", "79/100", "--ell", "4", "--n", "100", "--trials", "60", "--seed", "15",
       "--formula", kK4},
      {"check-events", "--alpha", "79/100", "--ell", "2", "--n", "60", "--trials", "4", "--seed",
       "16", "--set", "1,2", "--budget", "10"},
      {"sample", "--alpha", "79/100", "--n", "50", "--trials", "3", "--seed", "17"}};
  const std::string pair_path = "acceptance_edge_pair.txt";
  {
    std::ofstream(pair_path) << "n 2 q - h0 1 h1 1,2\n1 2\n";
  }
  std::size_t identical = 0;
  std::string failed;
  for (auto args : runs) {
    for (auto& a : args)
      if (a.empty()) a = pair_path;
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "2", "4", "1"}) {
      auto withthreads = args;
      withthreads.insert(withthreads.end(), {"--threads", threads});
      std::ostringstream out, err;
      const int code = run_cli(withthreads, out, err);
      outputs.push_back(code == kExitOk ? out.str() : "exit " + std::to_string(code) + err.str());
    }
    const bool same = !outputs[0].empty() && outputs[0].rfind("exit ", 0) != 0 &&
                      std::all_of(outputs.begin(), outputs.end(),
                                  [&](const std::string& o) { return o == outputs[0]; });
    identical += same;
    if (!same) failed += " " + args[0];
  }
  std::remove(pair_path.c_str());
  return {identical == runs.size(), std::to_string(identical) + "/" + std::to_string(runs.size()) +
                                         " commands byte-identical across threads 1,2,4" +
                                         (failed.empty() ? "" : "; differing:" + failed)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const std::vector<Criterion> criteria{
      {"classification oracle equivalence", classification_equivalence, 60},
      {"zeta exactness", zeta_exactness, 0},
      {"extension-count oracle", extension_count_oracle, 60},
      {"closed-form probability", closed_form_probability, 120},
      {"stretched-exponential regime", stretched_regime, 0},
      {"polynomial regime", polynomial_regime, 0},
      {"kernel structural facts", kernel_structure, 0},
      {"kernel-sentence link", kernel_sentence_link, 0},
      {"concentration trend", concentration_trend, 0},
      {"synthetic fitter calibration", fitter_calibration, 0},
      {"determinism across thread counts", determinism, 0}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].limit_seconds > 0 && secs >= criteria[i].limit_seconds) {
      o.pass = false;
      o.detail += "; exceeded " + fmt("%.0f", criteria[i].limit_seconds) + " s";
    }
    failures += !o.pass;
    std::printf("C%-2zu %s  %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
