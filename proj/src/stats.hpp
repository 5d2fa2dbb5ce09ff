#pragma once

#include <cstddef>
#include <vector>

namespace qot {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool contains(double p) const { return lo <= p && p <= hi; }
};

/// 95% Wilson score interval for a binomial proportion.
Interval wilson95(std::size_t successes, std::size_t trials);

/// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution.
double chi_square_p_value(double statistic, int dof);

/// Pearson chi-square independence test on a contingency table
/// (rows x cols of counts). Returns the p-value; rows or columns with
/// zero total are ignored in the degrees of freedom.
double chi_square_independence(const std::vector<std::vector<std::size_t>> &table);

/// Goodness-of-fit test of observed counts against expected
/// probabilities.
double chi_square_goodness(const std::vector<std::size_t> &observed,
                           const std::vector<double> &expected_probability);

} // namespace qot
