#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "byrdtd/mrp.hpp"
#include "byrdtd/topology.hpp"

namespace byrdtd {

// (1/N) sum_n (phi(s)^T theta_n - sum_{s'} P(s,s') (R_n(s,s') + gamma phi(s')^T theta_n))^2
// by direct summation over the successors of s.  thetas[n] pairs with reward agent n.
double squared_bellman_error(const MrpModel& model, const std::vector<VectorXd>& thetas, int s);

// Same quantity from precomputed Psi = Phi - gamma P Phi and expected local rewards.
class SbeEvaluator {
 public:
  explicit SbeEvaluator(const MrpModel& model);
  double operator()(const std::vector<VectorXd>& thetas, int s) const;

 private:
  MatrixXd psi_;           // S x D
  MatrixXd local_reward_;  // N x S
};

double consensus_error(const std::vector<VectorXd>& thetas);
// (1/N) sum_n ||theta_n - target||^2
double mean_squared_distance(const std::vector<VectorXd>& thetas, const VectorXd& target);

// N / min_n (N_n + B_n - 2 q_n + 1) - 1 over honest agents.
double degree_of_unsaturation(const NetworkTopology& topo);

// Largest across-agent variance of R_n(s, s') over transitions with P(s, s') > 0.
double measured_reward_variation(const MrpModel& model);

class MetricsTrace {
 public:
  void record(long k, double sbe, double ce, double fixed_point_dist);
  void reserve(std::size_t n);

  std::size_t size() const { return k_.size(); }
  bool empty() const { return k_.empty(); }

  const std::vector<long>& k() const { return k_; }
  const std::vector<double>& sbe() const { return sbe_; }
  const std::vector<double>& ce() const { return ce_; }
  const std::vector<double>& msbe() const { return msbe_; }
  const std::vector<double>& mce() const { return mce_; }
  const std::vector<double>& mce_rate_ratio() const { return ratio_; }
  const std::vector<double>& fixed_point_dist() const { return fpd_; }

  // Rebuilds a trace from stored columns (CSV round trips, trial averages).
  static MetricsTrace from_columns(std::vector<long> k, std::vector<double> sbe, std::vector<double> ce,
                                   std::vector<double> msbe, std::vector<double> mce, std::vector<double> ratio,
                                   std::vector<double> fpd);

 private:
  struct Compensated {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x);
    double value() const { return sum + carry; }
  };

  std::vector<long> k_;
  std::vector<double> sbe_, ce_, msbe_, mce_, ratio_, fpd_;
  Compensated sbe_sum_, ce_sum_;
};

// MCE * k / ln k for k >= 2; 0 at k = 1.
double mce_rate_ratio(double mce, long k);

struct PlateauStats {
  double mean = 0.0;
  double relative_spread = 0.0;  // (max - min) / mean
};

// Statistics of mce_rate_ratio over the trailing `window` fraction of the trace.
PlateauStats consensus_rate_diagnostic(const MetricsTrace& trace, double window);

// CSV with "# key: value" header lines followed by
// k,sbe,ce,msbe,mce,mce_rate_ratio,fixed_point_dist
void write_metrics_csv(std::ostream& out, const MetricsTrace& trace, const std::vector<std::string>& header_lines);
MetricsTrace read_metrics_csv(std::istream& in, const std::string& source_name = "<stream>",
                              std::vector<std::string>* header_lines = nullptr);

}  // namespace byrdtd
