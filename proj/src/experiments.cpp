#include "rigidlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rigidlab/canonical.hpp"
#include "rigidlab/parallel.hpp"

namespace rigidlab {

namespace {

void check_budget(const Formula& psi, const std::vector<std::size_t>& ns,
                  const ExperimentOptions& opt) {
  for (std::size_t n : ns) {
    const double work = evaluation_work(psi, n);
    if (work > opt.max_work)
      throw BudgetError("evaluation work " + std::to_string(work) + " at n=" + std::to_string(n) +
                        " exceeds the budget " + std::to_string(opt.max_work));
  }
}

void check_ns(const std::vector<std::size_t>& ns) {
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw std::invalid_argument("n must be at least 1");
    if (i > 0 && ns[i] <= ns[i - 1]) throw std::invalid_argument("n values must be increasing");
  }
}

std::optional<QSpec> template_q(const Graph& tmpl) {
  if (tmpl.q_set().empty()) return std::nullopt;
  return QSpec{tmpl.q_set(), tmpl.q_edges()};
}

Graph draw(const SampleConfig& cfg, const GraphSource& source) {
  if (source) return source(cfg);
  return cfg.q_spec ? sample_conditioned(cfg) : sample_graph(cfg);
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  bool ok = false;
};

// Weighted least squares y = intercept + slope x with weights w.
LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& w) {
  long double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  LineFit f;
  if (sw <= 0) return f;
  const long double mx = sx / sw, my = sy / sw;
  long double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) return f;
  f.slope = static_cast<double>(sxy / sxx);
  f.intercept = static_cast<double>(my - sxy / sxx * mx);
  f.ok = std::isfinite(f.slope) && std::isfinite(f.intercept);
  return f;
}

double log_falling(double n, std::uint32_t k) {
  if (n < k) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double centre = (p + z2 / (2.0 * t)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ProbCurve estimate_prob(const Formula& psi, const AlphaParam& a,
                        const std::vector<std::size_t>& ns, std::size_t trials,
                        std::uint64_t seed, const ExperimentOptions& opt) {
  if (!psi.is_sentence())
    throw EvaluationError("estimate_prob needs a sentence; free variables present");
  check_ns(ns);
  check_budget(psi, ns, opt);
  const CompiledFormula eval(psi);
  ProbCurve curve;
  curve.alpha = a;
  curve.formula_text = psi.to_string();
  curve.master_seed = seed;
  for (std::size_t n : ns) {
    std::vector<std::uint8_t> hit(trials, 0);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
      SampleConfig cfg{n, a, std::nullopt, seed, t};
      hit[t] = eval(sample_graph(cfg)) ? 1 : 0;
    });
    ProbPoint pt;
    pt.n = n;
    pt.trials = trials;
    for (auto h : hit) pt.hits += h;
    curve.points.push_back(pt);
  }
  return curve;
}

std::string to_string(DecayModel m) {
  switch (m) {
    case DecayModel::polynomial: return "polynomial";
    case DecayModel::stretched_exponential: return "stretched_exponential";
    case DecayModel::degenerate: return "degenerate";
  }
  return "unknown";
}

DecayFit fit_decay(const ProbCurve& curve) {
  std::vector<DecayPoint> pts;
  std::size_t censored = 0;
  for (const ProbPoint& p : curve.points) {
    if (p.exact_log_p) {
      const double lp = *p.exact_log_p;
      if (std::isfinite(lp) && lp < 0)
        pts.push_back({static_cast<double>(p.n), lp, kExactSigma * std::max(1.0, std::abs(lp))});
      continue;
    }
    if (p.trials == 0) continue;
    if (p.hits == 0) {
      ++censored;
      continue;
    }
    if (p.hits == p.trials) continue;
    const auto [lo, hi] = wilson_interval(p.hits, p.trials);
    const double lp = std::log(p.rate());
    const double sigma = (std::log(hi) - std::log(lo)) / (2.0 * 1.96);
    pts.push_back({static_cast<double>(p.n), lp, sigma});
  }
  return fit_decay_points(pts, censored);
}

DecayFit fit_decay_points(std::span<const DecayPoint> points, std::size_t censored) {
  DecayFit fit;
  fit.censored_points = censored;
  std::vector<DecayPoint> pts;
  for (const DecayPoint& p : points)
    if (p.n > 0 && std::isfinite(p.log_p) && p.log_p < 0 && p.sigma > 0) pts.push_back(p);
  fit.used_points = pts.size();
  if (pts.size() < 4) return fit;

  std::vector<double> x, y, w, ys, ws;
  for (const DecayPoint& p : pts) {
    x.push_back(std::log(p.n));
    y.push_back(p.log_p);
    w.push_back(1.0 / (p.sigma * p.sigma));
    const double s = p.sigma / std::abs(p.log_p);
    ys.push_back(std::log(-p.log_p));
    ws.push_back(1.0 / (s * s));
  }

  const LineFit poly = weighted_line(x, y, w);
  if (poly.ok && -poly.slope > 0) {
    fit.polynomial.valid = true;
    fit.polynomial.log_c = poly.intercept;
    fit.polynomial.exponent = -poly.slope;
    double chi2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (poly.intercept + poly.slope * x[i]);
      chi2 += r * r * w[i];
    }
    fit.polynomial.chi2 = chi2;
  }

  const LineFit str = weighted_line(x, ys, ws);
  if (str.ok && str.slope > 0) {
    fit.stretched.valid = true;
    fit.stretched.log_c = str.intercept;
    fit.stretched.exponent = str.slope;
    double chi2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] + std::exp(str.intercept + str.slope * x[i]);
      chi2 += r * r * w[i];
    }
    fit.stretched.chi2 = chi2;
  }

  fit.residual_polynomial = fit.polynomial.valid ? fit.polynomial.chi2
                                                 : std::numeric_limits<double>::infinity();
  fit.residual_stretched = fit.stretched.valid ? fit.stretched.chi2
                                               : std::numeric_limits<double>::infinity();

  if (fit.polynomial.valid &&
      !(fit.stretched.valid && fit.stretched.chi2 + kStretchedMargin < fit.polynomial.chi2)) {
    fit.model = DecayModel::polynomial;
    fit.c = std::exp(fit.polynomial.log_c);
    fit.beta = fit.polynomial.exponent;
  } else if (fit.stretched.valid) {
    fit.model = DecayModel::stretched_exponential;
    fit.c = std::exp(fit.stretched.log_c);
    fit.eps = fit.stretched.exponent;
  }
  return fit;
}

ConcReport concentration_report(const PairSpec& pair, const AlphaParam& a,
                                const std::vector<std::size_t>& ns, std::size_t trials,
                                std::size_t embeddings_per_trial, double eps, std::uint64_t seed,
                                const ExperimentOptions& opt) {
  const Classification cls = classify_pair(pair, a);
  if (!cls.safe) throw std::invalid_argument("concentration_report needs a safe pair");
  check_ns(ns);
  ConcReport rep;
  rep.pair = pair.h0.to_string() + " -> " + pair.h1.to_string();
  rep.ext_type = cls.ext_type;
  rep.eps = eps;
  rep.trials = trials;
  rep.embeddings_per_trial = embeddings_per_trial;
  rep.empty = trials == 0 || embeddings_per_trial == 0;
  if (rep.empty) return rep;

  const auto q = template_q(pair.ambient);
  const double value = cls.value.to_double();
  for (std::size_t n : ns) {
    ConcPoint pt;
    pt.n = n;
    const double ln = std::log(static_cast<double>(n));
    pt.lower = std::exp((value - eps) * ln);
    pt.upper = std::exp((value + eps) * ln);
    struct Tally {
      std::size_t ok = 0, below = 0, above = 0, missing = 0;
    };
    std::vector<Tally> tally(trials);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
      SampleConfig cfg{n, a, q, seed, t};
      const Graph g = q ? sample_conditioned(cfg) : sample_graph(cfg);
      std::mt19937_64 rng(derive_seed(seed, n, t, kEmbeddingStream));
      Tally& out = tally[t];
      for (std::size_t k = 0; k < embeddings_per_trial; ++k) {
        const auto f = random_embedding(g, pair.ambient, pair.h0, rng);
        if (!f) {
          ++out.missing;
          continue;
        }
        const double count = static_cast<double>(count_extensions(g, *f, pair));
        if (count <= pt.lower) ++out.below;
        else if (count >= pt.upper) ++out.above;
        else ++out.ok;
      }
    });
    for (const Tally& t : tally) {
      pt.embeddings += t.ok + t.below + t.above;
      pt.below += t.below;
      pt.above += t.above;
      pt.missing += t.missing;
    }
    pt.fraction = pt.embeddings ? static_cast<double>(pt.below + pt.above) /
                                      static_cast<double>(pt.embeddings)
                                : 0.0;
    rep.points.push_back(pt);
  }
  return rep;
}

RigidRate rigid_hit_rate(const PairSpec& pair, const AlphaParam& a, std::size_t n,
                         std::size_t trials, std::uint64_t seed, const ExperimentOptions& opt,
                         const GraphSource& source) {
  const Classification cls = classify_pair(pair, a);
  if (!cls.rigid) throw std::invalid_argument("rigid_hit_rate needs a rigid pair");
  const Graph& tmpl = pair.ambient;
  if (tmpl.order() > n) throw std::invalid_argument("template larger than n");

  Embedding f;
  for (Vertex v : pair.h0)
    if (!tmpl.in_q(v)) f.set(v, v);
  const auto q = template_q(tmpl);

  RigidRate r;
  r.n = n;
  r.trials = trials;
  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for(trials, opt.threads, [&](std::size_t t) {
    SampleConfig cfg{n, a, q, seed, t};
    hit[t] = has_extension(draw(cfg, source), f, pair) ? 1 : 0;
  });
  for (auto h : hit) r.hits += h;
  r.rate = trials ? static_cast<double>(r.hits) / static_cast<double>(trials) : 0.0;

  const std::size_t fixed = pair.h0.united(tmpl.q_set()).size();
  const double log_p = std::log(edge_probability(n, a));
  const double log_bound = log_falling(static_cast<double>(n - fixed), cls.ext_type.v) +
                           cls.ext_type.e * log_p -
                           std::log(static_cast<double>(extension_automorphisms(pair)));
  r.first_moment_bound = std::exp(log_bound);
  const double b = std::min(r.first_moment_bound, 1.0);
  r.sigma = trials ? std::sqrt(b * (1.0 - b) / static_cast<double>(trials)) : 0.0;
  return r;
}

namespace {

struct TrialOutcome {
  KernelTrial trial;
  bool e2_checked = false;
  bool e2_failed = false;
};

TrialOutcome run_kernel_trial(const AlphaParam& a, std::size_t ell_star, std::size_t n,
                              std::size_t t, std::uint64_t seed, std::size_t round_cap,
                              const GraphSource& source, double threshold,
                              std::size_t e2_budget) {
  SampleConfig cfg{n, a, std::nullopt, seed, t};
  const Graph g = draw(cfg, source);
  TrialOutcome out;
  out.trial.n = n;
  out.trial.trial = t;
  out.trial.result = rigid_kernel(g, ell_star, a, round_cap);
  out.trial.chain = extract_rigid_chain(g, out.trial.result, ell_star, a);
  if (e2_budget > 0 && !out.trial.result.truncated &&
      static_cast<double>(out.trial.result.kernel.size()) <= threshold) {
    const Graph gq = g.with_q(g.q_set().united(out.trial.result.kernel));
    const EventReport rep =
        check_generic_ext(gq, ell_star, a, e2_budget, derive_seed(seed, n, t, kEventStream));
    out.e2_checked = true;
    out.e2_failed = !rep.holds;
  }
  return out;
}

}  // namespace

std::vector<KernelTrial> kernel_trials(const AlphaParam& a, std::size_t ell_star, std::size_t n,
                                       std::size_t trials, std::uint64_t seed,
                                       const ExperimentOptions& opt, std::size_t round_cap,
                                       const GraphSource& source) {
  std::vector<KernelTrial> out(trials);
  parallel_for(trials, opt.threads, [&](std::size_t t) {
    out[t] = run_kernel_trial(a, ell_star, n, t, seed, round_cap, source, 0.0, 0).trial;
  });
  return out;
}

KernelCensus kernel_census(const AlphaParam& a, std::size_t ell_star,
                           const std::vector<std::size_t>& ns, std::size_t trials, double eps,
                           std::uint64_t seed, const ExperimentOptions& opt,
                           std::size_t e2_budget, const GraphSource& source) {
  check_ns(ns);
  KernelCensus census;
  census.ell_star = ell_star;
  census.eps = eps;
  if (trials == 0) return census;
  for (std::size_t n : ns) {
    CensusPoint pt;
    pt.n = n;
    pt.trials = trials;
    pt.threshold = std::pow(static_cast<double>(n), eps);
    std::vector<TrialOutcome> outcomes(trials);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
      outcomes[t] =
          run_kernel_trial(a, ell_star, n, t, seed, 0, source, pt.threshold, e2_budget);
    });
    std::size_t chain_total = 0;
    for (const TrialOutcome& o : outcomes) {
      const std::size_t size = o.trial.result.kernel.size();
      ++pt.histogram[size];
      if (static_cast<double>(size) > pt.threshold) ++pt.e1_count;
      if (o.trial.result.truncated) ++pt.truncated;
      const std::size_t len = o.trial.chain.entries.size();
      chain_total += len;
      pt.max_chain_length = std::max(pt.max_chain_length, len);
      if (o.e2_checked) ++pt.e2_checked;
      if (o.e2_failed) ++pt.e2_failures;
    }
    pt.e1_frequency = static_cast<double>(pt.e1_count) / static_cast<double>(trials);
    pt.mean_chain_length = static_cast<double>(chain_total) / static_cast<double>(trials);
    census.points.push_back(std::move(pt));
  }
  return census;
}

E1Bound e1_bound(double n, double eps, std::size_t ell_star, double zeta) {
  if (!(n > 0) || !(eps > 0) || ell_star == 0 || !(zeta > 0))
    throw std::invalid_argument("e1_bound needs positive inputs");
  E1Bound b;
  const long double ln = std::log(static_cast<long double>(n));
  const long double n_eps = std::exp(static_cast<long double>(eps) * ln);
  const long double ell = static_cast<long double>(ell_star);
  b.steps = static_cast<std::uint64_t>(std::floor(n_eps / ell));
  if (b.steps > 0) {
    // Sum over i < steps of log ell + ell log(ell i) + 2 ell log 2, i = 0 term without ell log(ell i).
    const long double s = static_cast<long double>(b.steps);
    long double total = s * (std::log(ell) + 2.0L * ell * std::log(2.0L));
    total += ell * ((s - 1.0L) * std::log(ell) + std::lgamma(s));
    b.log_seq_count = static_cast<double>(total);
  }
  b.log_simplified = static_cast<double>(eps * n_eps * ln);
  b.log_expected = static_cast<double>((eps - zeta) * n_eps * ln);
  return b;
}

AgreementReport agreement_experiment(const Formula& psi, const AlphaParam& a,
                                     std::size_t ell_star, std::size_t n, std::size_t trials,
                                     std::uint64_t seed, const ExperimentOptions& opt,
                                     const GraphSource& source) {
  if (!psi.is_sentence())
    throw EvaluationError("agreement_experiment needs a sentence; free variables present");
  check_budget(psi, {n}, opt);
  const CompiledFormula eval(psi);

  struct Outcome {
    bool excluded = false;
    bool value = false;
    std::string code;
    std::size_t kernel_size = 0;
  };
  std::vector<Outcome> outcomes(trials);
  parallel_for(trials, opt.threads, [&](std::size_t t) {
    SampleConfig cfg{n, a, std::nullopt, seed, t};
    const Graph g = draw(cfg, source);
    const KernelResult kr = rigid_kernel(g, ell_star, a);
    Outcome& o = outcomes[t];
    if (kr.truncated) {
      o.excluded = true;
      return;
    }
    o.kernel_size = kr.kernel.size();
    const InducedSubgraph sub = induced_subgraph(g, kr.kernel.united(g.q_set()));
    o.code = sub.empty ? std::string("0:") : canonical_code(sub.graph);
    o.value = eval(g);
  });

  AgreementReport rep;
  rep.n = n;
  rep.trials = trials;
  std::map<std::string, AgreementGroup> groups;
  std::size_t included = 0, agreeing = 0;
  for (const Outcome& o : outcomes) {
    if (o.excluded) {
      ++rep.excluded;
      continue;
    }
    ++included;
    AgreementGroup& grp = groups[o.code];
    grp.code = o.code;
    grp.kernel_size = o.kernel_size;
    ++grp.trials;
    if (o.value) ++grp.true_count;
    if (o.kernel_size == 0) {
      ++rep.empty_kernel_trials;
      if (o.value) ++rep.empty_kernel_true;
    }
  }
  for (auto& [code, grp] : groups) {
    agreeing += std::max(grp.true_count, grp.trials - grp.true_count);
    rep.groups.push_back(grp);
  }
  rep.agreement = included ? static_cast<double>(agreeing) / static_cast<double>(included) : 1.0;
  return rep;
}

}  // namespace rigidlab
