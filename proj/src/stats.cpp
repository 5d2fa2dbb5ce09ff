#include "stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qot {

Interval wilson95(std::size_t successes, std::size_t trials) {
    if (trials == 0) {
        throw std::invalid_argument("wilson95: zero trials");
    }
    const double z = 1.959963984540054; // 97.5% normal quantile
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return Interval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

// Lanczos log-gamma.
double log_gamma(double x) {
    static const double c[8] = {676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,    -176.61502916214059,
                                12.507343278686905,    -0.13857109526572012,
                                9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = 0.99999999999980993;
    const double t = x + 7.5;
    for (int i = 0; i < 8; ++i) {
        a += c[i] / (x + static_cast<double>(i) + 1.0);
    }
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Lower regularized incomplete gamma by series (x < a + 1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Upper regularized incomplete gamma by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

} // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) {
        throw std::invalid_argument("gamma_q: domain error");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return 1.0 - gamma_p_series(a, x);
    }
    return gamma_q_cf(a, x);
}

double chi_square_p_value(double statistic, int dof) {
    if (dof <= 0) {
        throw std::invalid_argument("chi_square_p_value: dof must be positive");
    }
    return gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

double chi_square_independence(const std::vector<std::vector<std::size_t>> &table) {
    const std::size_t rows = table.size();
    if (rows == 0) {
        throw std::invalid_argument("chi_square_independence: empty table");
    }
    const std::size_t cols = table.front().size();
    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (table[r].size() != cols) {
            throw std::invalid_argument("chi_square_independence: ragged table");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            row_sum[r] += static_cast<double>(table[r][c]);
            col_sum[c] += static_cast<double>(table[r][c]);
            total += static_cast<double>(table[r][c]);
        }
    }
    std::size_t live_rows = 0, live_cols = 0;
    for (double s : row_sum) {
        live_rows += s > 0.0 ? 1 : 0;
    }
    for (double s : col_sum) {
        live_cols += s > 0.0 ? 1 : 0;
    }
    if (live_rows < 2 || live_cols < 2) {
        return 1.0; // degenerate table carries no evidence of dependence
    }
    double stat = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double expected = row_sum[r] * col_sum[c] / total;
            if (expected > 0.0) {
                const double diff = static_cast<double>(table[r][c]) - expected;
                stat += diff * diff / expected;
            }
        }
    }
    const int dof = static_cast<int>((live_rows - 1) * (live_cols - 1));
    return chi_square_p_value(stat, dof);
}

double chi_square_goodness(const std::vector<std::size_t> &observed,
                           const std::vector<double> &expected_probability) {
    if (observed.size() != expected_probability.size() || observed.size() < 2) {
        throw std::invalid_argument("chi_square_goodness: shape mismatch");
    }
    double total = 0.0;
    for (std::size_t v : observed) {
        total += static_cast<double>(v);
    }
    double stat = 0.0;
    int dof = -1;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const double expected = total * expected_probability[k];
        if (expected > 0.0) {
            const double diff = static_cast<double>(observed[k]) - expected;
            stat += diff * diff / expected;
            ++dof;
        }
    }
    if (dof < 1) {
        return 1.0;
    }
    return chi_square_p_value(stat, dof);
}

} // namespace qot
