#include "wpk/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace wpk {

IntervalCandidate inverse_hls_scan(std::span<const double> g, double t0, double h, double q) {
    const std::size_t n = g.size();
    if (n == 0)
        throw std::invalid_argument("inverse_hls_scan: empty sample");
    if (!(q > 1.0) || !std::isfinite(q))
        throw std::invalid_argument("inverse_hls_scan: q must exceed 1");
    if (!(h > 0.0))
        throw std::invalid_argument("inverse_hls_scan: spacing must be positive");
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(g[i] >= 0.0) || !std::isfinite(g[i]))
            throw std::invalid_argument("inverse_hls_scan: G must be finite and nonnegative");
        prefix[i + 1] = prefix[i] + g[i];
    }
    IntervalCandidate best{t0, t0 + static_cast<double>(n) * h, 0, n, 0.0};
    if (prefix[n] == 0.0)
        return best;

    const double inv_q = 1.0 / q;
    auto measure = [&](std::size_t len) { return std::pow(static_cast<double>(len) * h, inv_q); };
    // best window of a given length: value and leftmost start
    std::vector<double> window(n + 1, -1.0);
    std::vector<std::size_t> start(n + 1, 0);
    auto evaluate = [&](std::size_t len) {
        if (window[len] >= 0.0)
            return;
        double w = -1.0;
        std::size_t at = 0;
        for (std::size_t i = 0; i + len <= n; ++i) {
            double s = prefix[i + len] - prefix[i];
            if (s > w) {
                w = s;
                at = i;
            }
        }
        window[len] = w;
        start[len] = at;
        double score = w * h / measure(len);
        if (score > best.score || (score == best.score && len < best.cell_count)) {
            best.score = score;
            best.first_cell = at;
            best.cell_count = len;
        }
    };

    std::vector<std::size_t> marks;
    for (std::size_t len = 1; len < n; len *= 2)
        marks.push_back(len);
    marks.push_back(n);
    for (auto len : marks)
        evaluate(len);

    // Bands (lo, hi) of unevaluated lengths; window sums are monotone in the
    // length, so W(hi) h / ((lo+1) h)^{1/q} bounds every score inside.
    struct Band {
        double bound;
        std::size_t lo, hi;
        bool operator<(const Band& o) const { return bound < o.bound || (bound == o.bound && lo > o.lo); }
    };
    auto bound = [&](std::size_t lo, std::size_t hi) { return window[hi] * h / measure(lo + 1); };
    std::priority_queue<Band> heap;
    for (std::size_t i = 1; i < marks.size(); ++i)
        if (marks[i] - marks[i - 1] > 1)
            heap.push({bound(marks[i - 1], marks[i]), marks[i - 1], marks[i]});
    while (!heap.empty()) {
        Band b = heap.top();
        heap.pop();
        if (b.bound < best.score)
            break;
        std::size_t mid = b.lo + (b.hi - b.lo) / 2;
        evaluate(mid);
        if (mid - b.lo > 1)
            heap.push({bound(b.lo, mid), b.lo, mid});
        if (b.hi - mid > 1)
            heap.push({bound(mid, b.hi), mid, b.hi});
    }
    best.t_start = t0 + static_cast<double>(best.first_cell) * h;
    best.t_end = best.t_start + static_cast<double>(best.cell_count) * h;
    return best;
}

LocateResult locate_interval(const Potential& p, const ComplexField& f, double q, double r,
                             const LocateParams& params) {
    if (!(q > 2.0) || !std::isfinite(q))
        throw std::invalid_argument("locate_interval: need 2 < q < inf");
    if (!(r >= 1.0))
        throw std::invalid_argument("locate_interval: r must be at least 1");
    if (!(params.delta0 > 0.0))
        throw std::invalid_argument("locate_interval: delta0 must be positive");
    LocateResult res;
    res.admissible = is_admissible(q, r);

    ComplexField start = evolve(p, f, 0.0, -params.delta0, params.evolve);
    std::vector<double> norms;
    evolve_observe(p, start, -params.delta0, params.delta0, params.evolve,
                   [&](int, double t, std::span<const cplx> u) {
                       ComplexField s(f.grid(), std::vector<cplx>(u.begin(), u.end()));
                       res.times.push_back(t);
                       norms.push_back(lp_norm(s, r));
                   });
    res.epsilon = mixed_norm_from_samples(res.times, norms, q);
    if (!(res.epsilon > 0.0))
        throw std::invalid_argument("locate_interval: zero solution");

    res.g.resize(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i)
        res.g[i] = std::pow(norms[i] / res.epsilon, q - 1.0);
    // uniform cells between recorded times, valued by the trapezoid average
    std::vector<double> cells(norms.size() - 1);
    for (std::size_t i = 0; i + 1 < norms.size(); ++i)
        cells[i] = 0.5 * (res.g[i] + res.g[i + 1]);
    double h = (res.times.back() - res.times.front()) / static_cast<double>(cells.size());
    res.interval = inverse_hls_scan(cells, res.times.front(), h, q);

    std::size_t a = res.interval.first_cell, b = a + res.interval.cell_count;
    std::span<const double> tj(res.times.data() + a, b - a + 1), nj(norms.data() + a, b - a + 1);
    res.lhs = mixed_norm_from_samples(tj, nj, q - 1.0);
    res.rhs = params.constant * std::pow(res.interval.length(), 1.0 / (q * (q - 1.0))) *
              std::pow(res.epsilon, q / (q - 2.0));
    res.ratio = res.lhs / res.rhs;
    res.passed = res.ratio >= 1.0;
    return res;
}

} // namespace wpk
