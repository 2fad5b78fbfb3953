#include "ruinlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ruinlab::numerics {

namespace {

#include "gauss_kronrod.inc"

struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    double error = 0.0;
};

// Evaluates the 7/15 Gauss-Kronrod pair on [lo, hi]. The error estimate is
// the plain |K15 - G7| difference; the adaptive driver only needs a
// consistent ranking of segments, not a sharp bound.
Segment evaluate(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int k = 0; k < 15; ++k) {
        const double y = f(center + half * kKronrodNode[k]);
        kronrod += kKronrodWeight[k] * y;
        if (k % 2 == 1) {
            gauss += kGaussWeight[k / 2] * y;
        }
    }
    Segment seg;
    seg.lo = lo;
    seg.hi = hi;
    seg.value = half * kronrod;
    seg.error = std::abs(half * (kronrod - gauss));
    return seg;
}

// Heap ordering: largest error first; ties broken by the left endpoint so
// the refinement order is fully deterministic.
bool worse(const Segment& a, const Segment& b) {
    if (a.error != b.error) return a.error > b.error;
    return a.lo < b.lo;
}

}  // namespace

QuadratureResult adaptive_quadrature(const std::function<double(double)>& f,
                                     double lo, double hi,
                                     double rel_tol, double abs_tol,
                                     int max_subdivisions) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw std::invalid_argument("adaptive_quadrature: invalid interval");
    }
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("adaptive_quadrature: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw std::invalid_argument("adaptive_quadrature: need at least one subdivision");
    }

    std::vector<Segment> heap;
    heap.reserve(static_cast<std::size_t>(max_subdivisions) + 2);
    heap.push_back(evaluate(f, lo, hi));

    QuadratureResult result;
    result.value = heap.front().value;
    result.error = heap.front().error;
    result.subdivisions = 0;

    auto cmp = [](const Segment& a, const Segment& b) { return worse(b, a); };
    while (result.error > std::max(abs_tol, rel_tol * std::abs(result.value))) {
        if (result.subdivisions >= max_subdivisions) {
            result.converged = false;
            return result;
        }
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const Segment target = heap.back();
        heap.pop_back();

        const double mid = 0.5 * (target.lo + target.hi);
        // A segment too narrow to bisect in floating point cannot improve;
        // reinstating it would loop forever, so report non-convergence.
        if (!(target.lo < mid && mid < target.hi)) {
            heap.push_back(target);
            std::push_heap(heap.begin(), heap.end(), cmp);
            result.converged = false;
            return result;
        }
        const Segment left = evaluate(f, target.lo, mid);
        const Segment right = evaluate(f, mid, target.hi);
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), cmp);
        ++result.subdivisions;

        // Recompute the totals from scratch each round. The heap never
        // exceeds max_subdivisions + 1 segments, so the O(n) sweep is cheap
        // and avoids drift from incremental add/subtract updates.
        result.value = 0.0;
        result.error = 0.0;
        for (const Segment& seg : heap) {
            result.value += seg.value;
            result.error += seg.error;
        }
    }
    result.converged = true;
    return result;
}

}  // namespace ruinlab::numerics
