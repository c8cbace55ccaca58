#include "rigidlab/records.hpp"

#include <cmath>

namespace rigidlab {

namespace {

// JSON has no infinity; unbounded values are written as null.
Record number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

Record record_base(const RecordContext& ctx, std::size_t n, std::size_t trials) {
  Record r;
  r["experiment"] = ctx.experiment;
  r["n"] = n;
  r["alpha_num"] = ctx.alpha.num;
  r["alpha_den"] = ctx.alpha.den;
  r["ell_star"] = ctx.ell_star;
  r["seed"] = ctx.seed;
  r["trials"] = trials;
  return r;
}

Record to_json(const VertexSet& s) {
  Record arr = Record::array();
  for (Vertex v : s) arr.push_back(v);
  return arr;
}

Record to_json(const ExtType& t) { return Record{{"v", t.v}, {"e", t.e}}; }

Record to_json(const RigidChain& chain) {
  Record arr = Record::array();
  for (const auto& entry : chain.entries) {
    Record e;
    e["ell"] = entry.vertices.size();
    e["vertices"] = to_json(entry.vertices);
    e["v"] = entry.type.v;
    e["e"] = entry.type.e;
    arr.push_back(std::move(e));
  }
  return arr;
}

Record classification_record(const PairSpec& p, const Classification& c) {
  Record r;
  r["experiment"] = "classify";
  r["h0"] = to_json(p.h0);
  r["h1"] = to_json(p.h1);
  r["q"] = to_json(p.ambient.q_set());
  r["v"] = c.ext_type.v;
  r["e"] = c.ext_type.e;
  r["value"] = c.value.to_string();
  r["dense"] = c.dense;
  r["sparse"] = c.sparse;
  r["safe"] = c.safe;
  r["rigid"] = c.rigid;
  r["hinged"] = c.hinged;
  return r;
}

Record closure_record(const RecordContext& ctx, std::size_t n, const VertexSet& x,
                      const KernelResult& kr) {
  Record r;
  r["experiment"] = ctx.experiment;
  r["n"] = n;
  r["alpha_num"] = ctx.alpha.num;
  r["alpha_den"] = ctx.alpha.den;
  r["ell_star"] = ctx.ell_star;
  r["base"] = to_json(x);
  r["closure"] = to_json(kr.kernel);
  r["rounds"] = kr.rounds;
  r["truncated"] = kr.truncated;
  Record adds = Record::array();
  for (const auto& a : kr.additions_per_round) adds.push_back(to_json(a));
  r["additions_per_round"] = std::move(adds);
  return r;
}

Record kernel_record(const RecordContext& ctx, const KernelTrial& t) {
  Record r;
  r["experiment"] = ctx.experiment;
  r["n"] = t.n;
  r["alpha_num"] = ctx.alpha.num;
  r["alpha_den"] = ctx.alpha.den;
  r["ell_star"] = ctx.ell_star;
  r["seed"] = ctx.seed;
  r["trial"] = t.trial;
  r["kernel"] = to_json(t.result.kernel);
  r["rounds"] = t.result.rounds;
  r["truncated"] = t.result.truncated;
  r["chain"] = to_json(t.chain);
  return r;
}

Record event_record(const RecordContext& ctx, std::size_t n, const EventReport& rep) {
  Record r;
  r["experiment"] = ctx.experiment;
  r["n"] = n;
  r["alpha_num"] = ctx.alpha.num;
  r["alpha_den"] = ctx.alpha.den;
  r["ell_star"] = ctx.ell_star;
  r["seed"] = ctx.seed;
  r["event"] = to_string(rep.event);
  r["holds"] = rep.holds;
  r["witnesses_checked"] = rep.witnesses_checked;
  r["failures"] = rep.failures;
  r["vacuous"] = rep.vacuous;
  if (rep.counterexample) {
    r["counterexample"] = Record{{"h0", to_json(rep.counterexample->h0)},
                                 {"h1", to_json(rep.counterexample->h1)},
                                 {"template", rep.counterexample->template_code}};
  } else {
    r["counterexample"] = nullptr;
  }
  return r;
}

std::vector<Record> curve_records(const RecordContext& ctx, const ProbCurve& curve) {
  std::vector<Record> out;
  for (const ProbPoint& p : curve.points) {
    Record r = record_base(ctx, p.n, p.trials);
    r["formula"] = curve.formula_text;
    r["hits"] = p.hits;
    r["rate"] = p.rate();
    const auto [lo, hi] = wilson_interval(p.hits, p.trials);
    r["wilson_lo"] = lo;
    r["wilson_hi"] = hi;
    if (p.hits == 0) r["upper95"] = p.upper95_zero();
    if (p.exact_log_p) r["log_p"] = *p.exact_log_p;
    out.push_back(std::move(r));
  }
  return out;
}

Record fit_record(const RecordContext& ctx, const DecayFit& fit) {
  auto model_json = [](const ModelFit& m) {
    return Record{{"valid", m.valid},
                  {"log_c", m.log_c},
                  {"exponent", m.exponent},
                  {"chi2", number(m.chi2)}};
  };
  Record r;
  r["experiment"] = ctx.experiment;
  r["model"] = to_string(fit.model);
  r["c"] = fit.c;
  r["beta"] = fit.beta;
  r["eps"] = fit.eps;
  r["residual_polynomial"] = number(fit.residual_polynomial);
  r["residual_stretched"] = number(fit.residual_stretched);
  r["polynomial"] = model_json(fit.polynomial);
  r["stretched"] = model_json(fit.stretched);
  r["used_points"] = fit.used_points;
  r["censored_points"] = fit.censored_points;
  return r;
}

std::vector<Record> concentration_records(const RecordContext& ctx, const ConcReport& rep) {
  std::vector<Record> out;
  if (rep.empty) {
    Record r = record_base(ctx, 0, rep.trials);
    r["pair"] = rep.pair;
    r["empty"] = true;
    out.push_back(std::move(r));
    return out;
  }
  for (const ConcPoint& p : rep.points) {
    Record r = record_base(ctx, p.n, rep.trials);
    r["pair"] = rep.pair;
    r["v"] = rep.ext_type.v;
    r["e"] = rep.ext_type.e;
    r["eps"] = rep.eps;
    r["embeddings_per_trial"] = rep.embeddings_per_trial;
    r["embeddings"] = p.embeddings;
    r["missing"] = p.missing;
    r["lower"] = p.lower;
    r["upper"] = p.upper;
    r["below"] = p.below;
    r["above"] = p.above;
    r["fraction"] = p.fraction;
    out.push_back(std::move(r));
  }
  return out;
}

Record rigid_rate_record(const RecordContext& ctx, const RigidRate& rr) {
  Record r = record_base(ctx, rr.n, rr.trials);
  r["hits"] = rr.hits;
  r["rate"] = rr.rate;
  r["first_moment_bound"] = number(rr.first_moment_bound);
  r["sigma"] = rr.sigma;
  return r;
}

std::vector<Record> census_records(const RecordContext& ctx, const KernelCensus& census) {
  std::vector<Record> out;
  for (const CensusPoint& p : census.points) {
    Record r = record_base(ctx, p.n, p.trials);
    r["eps"] = census.eps;
    Record hist = Record::array();
    for (const auto& [size, count] : p.histogram) hist.push_back(Record::array({size, count}));
    r["histogram"] = std::move(hist);
    r["threshold"] = p.threshold;
    r["e1_count"] = p.e1_count;
    r["e1_frequency"] = p.e1_frequency;
    r["truncated"] = p.truncated;
    r["mean_chain_length"] = p.mean_chain_length;
    r["max_chain_length"] = p.max_chain_length;
    r["e2_checked"] = p.e2_checked;
    r["e2_failures"] = p.e2_failures;
    out.push_back(std::move(r));
  }
  return out;
}

Record e1_record(double n, double eps, std::size_t ell_star, double zeta, const E1Bound& b) {
  Record r;
  r["experiment"] = "e1-bound";
  r["n"] = n;
  r["eps"] = eps;
  r["ell_star"] = ell_star;
  r["zeta"] = zeta;
  r["steps"] = b.steps;
  r["log_seq_count"] = b.log_seq_count;
  r["log_simplified"] = b.log_simplified;
  r["log_expected"] = b.log_expected;
  return r;
}

Record agreement_record(const RecordContext& ctx, const AgreementReport& rep) {
  Record r = record_base(ctx, rep.n, rep.trials);
  r["excluded"] = rep.excluded;
  r["agreement"] = rep.agreement;
  r["empty_kernel_trials"] = rep.empty_kernel_trials;
  r["empty_kernel_true"] = rep.empty_kernel_true;
  Record groups = Record::array();
  for (const AgreementGroup& g : rep.groups) {
    groups.push_back(Record{{"code", g.code},
                            {"kernel_size", g.kernel_size},
                            {"trials", g.trials},
                            {"true", g.true_count},
                            {"constant", g.constant()}});
  }
  r["groups"] = std::move(groups);
  return r;
}

ProbCurve curve_from_records(std::istream& in) {
  ProbCurve curve;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Record r;
    try {
      r = Record::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!r.is_object() || !r.contains("n")) continue;
    ProbPoint p;
    if (r.contains("log_p") && r["log_p"].is_number()) {
      p.exact_log_p = r["log_p"].get<double>();
    } else if (!r.contains("hits") || !r.contains("trials") || !r["hits"].is_number()) {
      continue;
    } else {
      p.hits = r["hits"].get<std::size_t>();
      p.trials = r["trials"].get<std::size_t>();
    }
    p.n = r["n"].get<std::size_t>();
    if (curve.points.empty()) {
      if (r.contains("alpha_num")) curve.alpha.num = r["alpha_num"].get<std::int64_t>();
      if (r.contains("alpha_den")) curve.alpha.den = r["alpha_den"].get<std::int64_t>();
      if (r.contains("seed")) curve.master_seed = r["seed"].get<std::uint64_t>();
      if (r.contains("formula")) curve.formula_text = r["formula"].get<std::string>();
    }
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace rigidlab
