#include "posekit/eval/prc.hpp"

#include <algorithm>
#include <map>

#include "posekit/error.hpp"

namespace posekit::eval {

namespace {

__extension__ using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        const u128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

// Running sum of non-negative fractions. `ok` drops once the reduced fraction
// no longer fits comfortably in 128 bits.
struct ExactSum {
    u128 num = 0;
    u128 den = 1;
    bool ok = true;

    void add(u128 n, u128 m) {  // += n / m
        constexpr u128 big = u128(1) << 120;
        if (!ok) return;
        u128 g = gcd128(n, m);
        n /= g;
        m /= g;
        g = gcd128(den, m);
        const u128 scale_self = m / g;
        const u128 scale_term = den / g;
        if ((num != 0 && scale_self > big / num) || (n != 0 && scale_term > big / n) ||
            den > big / scale_self) {
            ok = false;
            return;
        }
        num = num * scale_self + n * scale_term;
        den *= scale_self;
        g = gcd128(num, den);
        num /= g;
        den /= g;
    }

    double value() const {
        constexpr u128 exact_limit = u128(1) << 53;
        // Both operands exact in a double: one correctly rounded division.
        if (num < exact_limit && den < exact_limit)
            return static_cast<double>(num) / static_cast<double>(den);
        return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }
};

}  // namespace

PrCurve prc_auc(std::span<const ScoredDetection> detections, std::size_t ground_truth_count) {
    if (ground_truth_count == 0) {
        throw Error(ErrorCode::UndefinedRecall, "recall needs at least one ground-truth object");
    }
    std::size_t max_count = 0;
    for (const auto &d : detections) max_count = std::max(max_count, d.correspondence_count);
    PrCurve curve;
    if (max_count < kMinCorrespondences) return curve;

    // cumulative counts of detections with at least t correspondences
    std::vector<std::size_t> tp(max_count + 2, 0);
    std::vector<std::size_t> all(max_count + 2, 0);
    for (const auto &d : detections) {
        tp[d.correspondence_count] += d.is_true_positive ? 1 : 0;
        all[d.correspondence_count] += 1;
    }
    for (std::size_t t = max_count; t-- > 0;) {
        tp[t] += tp[t + 1];
        all[t] += all[t + 1];
    }

    curve.points.resize(max_count - kMinCorrespondences + 1);
    for (std::size_t t = kMinCorrespondences; t <= max_count; ++t) {
        PrPoint &p = curve.points[t - kMinCorrespondences];
        p.threshold = t;
        // the detection holding max_count passes every threshold, so all[t] > 0
        p.precision = static_cast<double>(tp[t]) / static_cast<double>(all[t]);
        p.recall = static_cast<double>(tp[t]) / static_cast<double>(ground_truth_count);
    }

    // Trapezoids in recall from the anchor (recall 0, precision at the top
    // threshold), walking down the thresholds. Precision and recall are count
    // ratios, so the area is also summed as an exact fraction and rounded once;
    // the double sum is the fallback if that fraction grows too large.
    double area = 0.0;
    ExactSum exact;
    std::size_t prev_tp = 0;
    std::size_t prev_a = tp[max_count];
    std::size_t prev_b = all[max_count];
    for (std::size_t t = max_count; t >= kMinCorrespondences; --t) {
        const double r0 = static_cast<double>(prev_tp) / static_cast<double>(ground_truth_count);
        const double p0 = static_cast<double>(prev_a) / static_cast<double>(prev_b);
        const PrPoint &p = curve.points[t - kMinCorrespondences];
        area += (p.recall - r0) * (p.precision + p0) / 2.0;
        if (tp[t] != prev_tp) {
            // (dtp / gt) * (a0 / b0 + a / b) / 2
            const u128 dtp = tp[t] - prev_tp;
            exact.add(dtp * (u128(prev_a) * all[t] + u128(tp[t]) * prev_b),
                      u128(2) * ground_truth_count * prev_b * all[t]);
        }
        prev_tp = tp[t];
        prev_a = tp[t];
        prev_b = all[t];
    }
    curve.auc = exact.ok ? exact.value() : area;
    return curve;
}

PrCurve prc_auc(std::span<const DetectionRecord> records, std::size_t ground_truth_count) {
    std::vector<ScoredDetection> d;
    d.reserve(records.size());
    for (const auto &r : records) d.push_back({r.correspondence_count, r.is_true_positive});
    return prc_auc(std::span<const ScoredDetection>(d), ground_truth_count);
}

std::vector<MethodTiming> aggregate_timings(std::span<const DetectionRecord> records) {
    struct Sums {
        double total[3] = {0.0, 0.0, 0.0};
        std::size_t n[3] = {0, 0, 0};
    };
    std::map<std::string, Sums> by_method;
    for (const auto &r : records) {
        Sums &s = by_method[r.method];
        const std::optional<double> stages[3] = {r.stage_timings.classify, r.stage_timings.coarse,
                                                 r.stage_timings.icp};
        for (int k = 0; k < 3; ++k) {
            if (!stages[k]) continue;
            s.total[k] += *stages[k];
            ++s.n[k];
        }
    }
    static const char *names[3] = {"classify", "classify+coarse", "classify+coarse+icp"};
    std::vector<MethodTiming> out;
    for (const auto &[method, s] : by_method) {
        MethodTiming m{method, {}};
        double cumulative = 0.0;
        for (int k = 0; k < 3; ++k) {
            if (s.n[k] == 0) break;
            cumulative += s.total[k] / static_cast<double>(s.n[k]);
            m.columns.push_back({names[k], cumulative, cumulative > 0.0 ? 1.0 / cumulative : 0.0,
                                 s.n[k]});
        }
        if (!m.columns.empty()) out.push_back(std::move(m));
    }
    return out;
}

}  // namespace posekit::eval
