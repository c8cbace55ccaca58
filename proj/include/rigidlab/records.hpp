#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rigidlab/experiments.hpp"

namespace rigidlab {

// One JSON-lines record; keys keep insertion order so output is byte-stable.
using Record = nlohmann::ordered_json;

struct RecordContext {
  std::string experiment;
  AlphaParam alpha;
  std::size_t ell_star = 0;
  std::uint64_t seed = 0;
};

// {experiment, n, alpha_num, alpha_den, ell_star, seed, trials}
Record record_base(const RecordContext& ctx, std::size_t n, std::size_t trials);

Record to_json(const VertexSet& s);
Record to_json(const ExtType& t);
Record to_json(const RigidChain& chain);

Record classification_record(const PairSpec& p, const Classification& c);
Record closure_record(const RecordContext& ctx, std::size_t n, const VertexSet& x,
                      const KernelResult& kr);
Record kernel_record(const RecordContext& ctx, const KernelTrial& t);
Record event_record(const RecordContext& ctx, std::size_t n, const EventReport& r);
std::vector<Record> curve_records(const RecordContext& ctx, const ProbCurve& curve);
Record fit_record(const RecordContext& ctx, const DecayFit& fit);
std::vector<Record> concentration_records(const RecordContext& ctx, const ConcReport& rep);
Record rigid_rate_record(const RecordContext& ctx, const RigidRate& r);
std::vector<Record> census_records(const RecordContext& ctx, const KernelCensus& census);
Record e1_record(double n, double eps, std::size_t ell_star, double zeta, const E1Bound& b);
Record agreement_record(const RecordContext& ctx, const AgreementReport& rep);

// Rebuilds a curve from records carrying n with hits/trials or with log_p,
// in input order. Other records are skipped.
ProbCurve curve_from_records(std::istream& in);

}  // namespace rigidlab
