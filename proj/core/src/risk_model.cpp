#include "survsplit/risk_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "survsplit/error.hpp"

namespace survsplit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoEvents: return "NoEvents";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateCovariate: return "DegenerateCovariate";
    case ErrorCode::ZeroScale: return "ZeroScale";
    case ErrorCode::NoAdmissibleCut: return "NoAdmissibleCut";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

RiskTable RiskTable::build(std::span<const Subject> data,
                           std::optional<std::vector<double>> weights) {
  if (data.empty()) {
    throw Error(ErrorCode::InvalidArgument, "risk table: empty dataset");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i].time) || !std::isfinite(data[i].z)) {
      throw Error(ErrorCode::NonFinite,
                  "risk table: non-finite value for subject " + std::to_string(i));
    }
    if (data[i].time < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "risk table: negative time for subject " + std::to_string(i));
    }
  }

  RiskTable rt;
  rt.order_.resize(data.size());
  std::iota(rt.order_.begin(), rt.order_.end(), std::size_t{0});
  // Failures ahead of censorings at equal times; index as final tie-break.
  std::sort(rt.order_.begin(), rt.order_.end(), [&](std::size_t a, std::size_t b) {
    if (data[a].time != data[b].time) return data[a].time < data[b].time;
    if (data[a].event != data[b].event) return data[a].event;
    return a < b;
  });

  const std::size_t n = data.size();
  rt.fail_offsets_.push_back(0);
  std::size_t pos = 0;
  while (pos < n) {
    const double t = data[rt.order_[pos]].time;
    std::size_t end = pos;
    while (end < n && data[rt.order_[end]].time == t) ++end;
    int d = 0;
    for (std::size_t j = pos; j < end; ++j) {
      const std::size_t i = rt.order_[j];
      if (data[i].event) {
        rt.fail_members_.push_back(i);
        ++d;
      }
    }
    if (d > 0) {
      rt.event_times_.push_back(t);
      rt.failures_.push_back(d);
      rt.at_risk_.push_back(static_cast<int>(n - pos));
      rt.risk_start_.push_back(pos);
      rt.fail_offsets_.push_back(rt.fail_members_.size());
    }
    pos = end;
  }

  if (rt.event_times_.empty()) {
    throw Error(ErrorCode::NoEvents, "risk table: every subject is censored");
  }

  if (weights) {
    if (weights->size() != rt.event_times_.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "risk table: expected " + std::to_string(rt.event_times_.size()) +
                      " weights, got " + std::to_string(weights->size()));
    }
    for (double w : *weights) {
      if (!std::isfinite(w)) throw Error(ErrorCode::NonFinite, "risk table: non-finite weight");
    }
    rt.weights_ = std::move(*weights);
  } else {
    rt.weights_.assign(rt.event_times_.size(), 1.0);
  }
  return rt;
}

std::span<const std::size_t> RiskTable::risk_members(std::size_t k) const {
  const std::size_t start = risk_start_.at(k);
  return std::span<const std::size_t>(order_).subspan(start);
}

std::span<const std::size_t> RiskTable::failing(std::size_t k) const {
  const std::size_t lo = fail_offsets_.at(k);
  const std::size_t hi = fail_offsets_.at(k + 1);
  return std::span<const std::size_t>(fail_members_).subspan(lo, hi - lo);
}

LeftCounts aggregate_left(const RiskTable& rt, std::span<const double> subject_weight) {
  const auto& order = rt.time_order();
  const std::size_t n = order.size();
  const std::size_t num_k = rt.num_event_times();
  if (subject_weight.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "aggregate_left: weight vector size mismatch");
  }

  LeftCounts out;
  out.at_risk.resize(num_k);
  out.failures.resize(num_k);

  // Walk event times from last to first, extending the suffix sum.
  double suffix = 0.0;
  std::size_t pos = n;
  for (std::size_t k = num_k; k-- > 0;) {
    const std::size_t start = rt.risk_start(k);
    while (pos > start) {
      --pos;
      suffix += subject_weight[order[pos]];
    }
    out.at_risk[k] = suffix;
    double fail = 0.0;
    for (std::size_t i : rt.failing(k)) fail += subject_weight[i];
    out.failures[k] = fail;
  }
  return out;
}

LeftCounts left_counts(const RiskTable& rt, std::span<const Subject> data, double c) {
  std::vector<double> indicator(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) indicator[i] = data[i].z <= c ? 1.0 : 0.0;
  return aggregate_left(rt, indicator);
}

std::vector<double> candidate_cutpoints(std::span<const Subject> data) {
  if (data.empty()) {
    throw Error(ErrorCode::InvalidArgument, "candidate_cutpoints: empty dataset");
  }
  std::vector<double> zs;
  zs.reserve(data.size());
  for (const auto& s : data) zs.push_back(s.z);
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  if (zs.size() < 2) {
    throw Error(ErrorCode::DegenerateCovariate, "candidate_cutpoints: all covariate values equal");
  }
  std::vector<double> cuts;
  cuts.reserve(zs.size() - 1);
  for (std::size_t j = 0; j + 1 < zs.size(); ++j) {
    const double mid = zs[j] + 0.5 * (zs[j + 1] - zs[j]);
    // Adjacent doubles can round the midpoint onto an endpoint.
    if (mid > zs[j] && mid < zs[j + 1]) cuts.push_back(mid);
  }
  if (cuts.empty()) {
    throw Error(ErrorCode::DegenerateCovariate, "candidate_cutpoints: no representable midpoint");
  }
  return cuts;
}

bool normalize_covariate(Dataset& data) {
  const bool inside = std::all_of(data.begin(), data.end(),
                                  [](const Subject& s) { return s.z >= 0.0 && s.z <= 1.0; });
  if (inside || data.empty()) return false;

  const std::size_t n = data.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return data[a].z < data[b].z; });
  std::vector<double> scaled(n);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos;
    while (end < n && data[idx[end]].z == data[idx[pos]].z) ++end;
    // Average 1-based rank over the tie block keeps tied values tied.
    const double rank = 0.5 * static_cast<double>(pos + 1 + end);
    for (std::size_t j = pos; j < end; ++j) {
      scaled[idx[j]] = (rank - 0.5) / static_cast<double>(n);
    }
    pos = end;
  }
  for (std::size_t i = 0; i < n; ++i) data[i].z = scaled[i];
  return true;
}

}  // namespace survsplit
