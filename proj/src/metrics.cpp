#include "byrdtd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "byrdtd/error.hpp"

namespace byrdtd {

double squared_bellman_error(const MrpModel& model, const std::vector<VectorXd>& thetas, int s) {
  const double gamma = model.discount();
  double total = 0.0;
  for (std::size_t n = 0; n < thetas.size(); ++n) {
    const VectorXd& theta = thetas[n];
    double expected = 0.0;
    for (const SuccessorEntry& e : model.successors(s))
      expected += e.prob * (model.reward(static_cast<int>(n), s, e.state) + gamma * model.phi(e.state).dot(theta));
    const double residual = model.phi(s).dot(theta) - expected;
    total += residual * residual;
  }
  return thetas.empty() ? 0.0 : total / static_cast<double>(thetas.size());
}

SbeEvaluator::SbeEvaluator(const MrpModel& model)
    : psi_(model.features() - model.discount() * (model.transition() * model.features())),
      local_reward_(model.num_agents(), model.num_states()) {
  for (int n = 0; n < model.num_agents(); ++n) local_reward_.row(n) = model.expected_local_reward(n).transpose();
}

double SbeEvaluator::operator()(const std::vector<VectorXd>& thetas, int s) const {
  double total = 0.0;
  for (std::size_t n = 0; n < thetas.size(); ++n) {
    const double residual = psi_.row(s).dot(thetas[n]) - local_reward_(static_cast<Eigen::Index>(n), s);
    total += residual * residual;
  }
  return thetas.empty() ? 0.0 : total / static_cast<double>(thetas.size());
}

double consensus_error(const std::vector<VectorXd>& thetas) {
  if (thetas.empty()) return 0.0;
  VectorXd mean = VectorXd::Zero(thetas.front().size());
  for (const VectorXd& t : thetas) mean += t;
  mean /= static_cast<double>(thetas.size());
  return mean_squared_distance(thetas, mean);
}

double mean_squared_distance(const std::vector<VectorXd>& thetas, const VectorXd& target) {
  if (thetas.empty()) return 0.0;
  double total = 0.0;
  for (const VectorXd& t : thetas) total += (t - target).squaredNorm();
  return total / static_cast<double>(thetas.size());
}

double degree_of_unsaturation(const NetworkTopology& topo) {
  int smallest = std::numeric_limits<int>::max();
  for (int id : topo.honest()) smallest = std::min(smallest, topo.neighbors_of(id).total() - 2 * topo.trim(id) + 1);
  return static_cast<double>(topo.num_honest()) / static_cast<double>(smallest) - 1.0;
}

double measured_reward_variation(const MrpModel& model) {
  const int N = model.num_agents();
  double worst = 0.0;
  std::vector<double> r(static_cast<std::size_t>(N));
  for (int s = 0; s < model.num_states(); ++s) {
    for (const SuccessorEntry& e : model.successors(s)) {
      double mean = 0.0;
      for (int n = 0; n < N; ++n) mean += r[static_cast<std::size_t>(n)] = model.reward(n, s, e.state);
      mean /= N;
      double var = 0.0;
      for (double v : r) var += (v - mean) * (v - mean);
      worst = std::max(worst, var / N);
    }
  }
  return worst;
}

void MetricsTrace::Compensated::add(double x) {
  // Neumaier variant of Kahan summation.
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
  else carry += (x - t) + sum;
  sum = t;
}

double mce_rate_ratio(double mce, long k) {
  if (k < 2) return 0.0;
  return mce * static_cast<double>(k) / std::log(static_cast<double>(k));
}

void MetricsTrace::reserve(std::size_t n) {
  k_.reserve(n);
  for (auto* v : {&sbe_, &ce_, &msbe_, &mce_, &ratio_, &fpd_}) v->reserve(n);
}

void MetricsTrace::record(long k, double sbe, double ce, double fixed_point_dist) {
  k_.push_back(k);
  sbe_.push_back(sbe);
  ce_.push_back(ce);
  fpd_.push_back(fixed_point_dist);
  sbe_sum_.add(sbe);
  ce_sum_.add(ce);
  const double count = static_cast<double>(k_.size());
  msbe_.push_back(sbe_sum_.value() / count);
  mce_.push_back(ce_sum_.value() / count);
  ratio_.push_back(byrdtd::mce_rate_ratio(mce_.back(), k));
}

MetricsTrace MetricsTrace::from_columns(std::vector<long> k, std::vector<double> sbe, std::vector<double> ce,
                                        std::vector<double> msbe, std::vector<double> mce, std::vector<double> ratio,
                                        std::vector<double> fpd) {
  const std::size_t n = k.size();
  for (const auto* v : {&sbe, &ce, &msbe, &mce, &ratio, &fpd})
    if (v->size() != n) throw Error(ErrorCode::InvalidSpec, "metric columns differ in length");
  MetricsTrace t;
  t.k_ = std::move(k);
  t.sbe_ = std::move(sbe);
  t.ce_ = std::move(ce);
  t.msbe_ = std::move(msbe);
  t.mce_ = std::move(mce);
  t.ratio_ = std::move(ratio);
  t.fpd_ = std::move(fpd);
  for (double v : t.sbe_) t.sbe_sum_.add(v);
  for (double v : t.ce_) t.ce_sum_.add(v);
  return t;
}

PlateauStats consensus_rate_diagnostic(const MetricsTrace& trace, double window) {
  if (trace.size() < 1000) throw Error(ErrorCode::TooShort, "consensus-rate diagnostic needs at least 1000 steps");
  if (!(window > 0.0 && window <= 1.0)) throw Error(ErrorCode::InvalidSpec, "window must lie in (0, 1]");
  const auto& ratio = trace.mce_rate_ratio();
  const std::size_t n = ratio.size();
  std::size_t start = n - static_cast<std::size_t>(std::ceil(window * static_cast<double>(n)));
  start = std::max<std::size_t>(start, 1);  // k = 1 carries the placeholder 0
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    lo = std::min(lo, ratio[i]);
    hi = std::max(hi, ratio[i]);
    sum += ratio[i];
  }
  PlateauStats out;
  out.mean = sum / static_cast<double>(n - start);
  out.relative_spread = out.mean != 0.0 ? (hi - lo) / out.mean : std::numeric_limits<double>::infinity();
  return out;
}

namespace {

constexpr const char* kColumns = "k,sbe,ce,msbe,mce,mce_rate_ratio,fixed_point_dist";

void put_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricsTrace& trace, const std::vector<std::string>& header_lines) {
  for (const std::string& line : header_lines) out << "# " << line << '\n';
  out << kColumns << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.k()[i];
    for (const auto* col : {&trace.sbe(), &trace.ce(), &trace.msbe(), &trace.mce(), &trace.mce_rate_ratio(),
                            &trace.fixed_point_dist()}) {
      out << ',';
      put_double(out, (*col)[i]);
    }
    out << '\n';
  }
}

MetricsTrace read_metrics_csv(std::istream& in, const std::string& source_name, std::vector<std::string>* header_lines) {
  std::vector<long> k;
  std::vector<double> cols[6];
  std::string line;
  int line_no = 0;
  bool seen_columns = false;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::ParseError, source_name + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_lines) header_lines->push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    if (!seen_columns) {
      if (line != kColumns) fail("expected column header '" + std::string(kColumns) + "'");
      seen_columns = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    if (!std::getline(row, cell, ',')) fail("empty row");
    try {
      k.push_back(std::stol(cell));
      for (auto& col : cols) {
        if (!std::getline(row, cell, ',')) fail("expected 7 columns");
        col.push_back(std::stod(cell));
      }
    } catch (const std::logic_error&) {
      fail("malformed number '" + cell + "'");
    }
  }
  if (!seen_columns) fail("missing column header");
  return MetricsTrace::from_columns(std::move(k), std::move(cols[0]), std::move(cols[1]), std::move(cols[2]),
                                    std::move(cols[3]), std::move(cols[4]), std::move(cols[5]));
}

}  // namespace byrdtd
