#include "acai/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace acai::stats {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson: size mismatch or too few samples");
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, sa = 0.0, sb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        sa += da * da;
        sb += db * db;
    }
    if (sa <= 0.0 || sb <= 0.0) return 0.0;
    return sab / std::sqrt(sa * sb);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: size mismatch or too few samples");
    return pearson(average_ranks(a), average_ranks(b));
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return d;
}

double ks_uniform(std::vector<double> sample, double lo, double hi) {
    if (sample.empty()) throw std::invalid_argument("ks_uniform: empty sample");
    if (!(lo < hi)) throw std::invalid_argument("ks_uniform: lo must be < hi");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        double f = (sample[i] - lo) / (hi - lo);
        f = std::clamp(f, 0.0, 1.0);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double gamma_q(double a, double x) { return boost::math::gamma_q(a, x); }

double chi2_independence_p(const std::vector<std::vector<double>>& table) {
    if (table.empty() || table[0].empty())
        throw std::invalid_argument("chi2: empty table");
    const size_t rows = table.size(), cols = table[0].size();
    std::vector<double> rsum(rows, 0.0), csum(cols, 0.0);
    double total = 0.0;
    for (size_t r = 0; r < rows; ++r) {
        if (table[r].size() != cols) throw std::invalid_argument("chi2: ragged table");
        for (size_t c = 0; c < cols; ++c) {
            rsum[r] += table[r][c];
            csum[c] += table[r][c];
            total += table[r][c];
        }
    }
    if (total <= 0.0) throw std::invalid_argument("chi2: empty counts");
    double chi2 = 0.0;
    size_t used_rows = 0, used_cols = 0;
    for (size_t r = 0; r < rows; ++r)
        if (rsum[r] > 0.0) ++used_rows;
    for (size_t c = 0; c < cols; ++c)
        if (csum[c] > 0.0) ++used_cols;
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            const double e = rsum[r] * csum[c] / total;
            if (e <= 0.0) continue;
            const double d = table[r][c] - e;
            chi2 += d * d / e;
        }
    }
    const double df = static_cast<double>((used_rows - 1) * (used_cols - 1));
    if (df <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * chi2);
}

}  // namespace acai::stats
