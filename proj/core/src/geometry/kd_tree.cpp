#include "posekit/geometry/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "posekit/error.hpp"

namespace posekit::geometry {

KdTree::KdTree(std::span<const Vec3> points) : size_(points.size()), dim_(3) {
    std::vector<double> data(points.size() * 3);
    for (std::size_t i = 0; i < points.size(); ++i) {
        data[3 * i + 0] = points[i].x();
        data[3 * i + 1] = points[i].y();
        data[3 * i + 2] = points[i].z();
    }
    build(data);
}

KdTree::KdTree(std::span<const double> data, std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidParameter, "zero dimension");
    if (data.size() % dim != 0) {
        throw Error(ErrorCode::InvalidParameter,
                    "data length is not a multiple of the dimension");
    }
    size_ = data.size() / dim;
    build(data);
}

void KdTree::build(std::span<const double> data) {
    if (size_ > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::InvalidParameter, "too many points for kd-tree");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidParameter,
                        "kd-tree input contains a non-finite coordinate");
        }
    }
    order_.resize(size_);
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.clear();
    if (size_ > 0) {
        nodes_.reserve(2 * (size_ / kLeafSize + 1));
        build_node(0, static_cast<std::uint32_t>(size_), data);
    }
    coords_.resize(size_ * dim_);
    for (std::size_t slot = 0; slot < size_; ++slot) {
        std::copy_n(data.begin() + order_[slot] * dim_, dim_,
                    coords_.begin() + slot * dim_);
    }
}

std::int32_t KdTree::build_node(std::uint32_t begin, std::uint32_t end,
                                std::span<const double> data) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    std::uint32_t best_dim = 0;
    double best_spread = -1.0;
    for (std::uint32_t d = 0; d < dim_; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t s = begin; s < end; ++s) {
            const double v = data[order_[s] * dim_ + d];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    if (best_spread <= 0.0) return id;  // all coincident: keep as a leaf

    const std::uint32_t mid = begin + (end - begin) / 2;
    auto key = [&](std::uint32_t idx) { return data[idx * dim_ + best_dim]; };
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ka = key(a);
                         const double kb = key(b);
                         return ka < kb || (ka == kb && a < b);
                     });
    const double split = key(order_[mid]);
    const std::int32_t left = build_node(begin, mid, data);
    const std::int32_t right = build_node(mid, end, data);
    Node &node = nodes_[id];
    node.left = left;
    node.right = right;
    node.split_dim = best_dim;
    node.split_value = split;
    return id;
}

double KdTree::squared_distance(std::span<const double> query,
                                std::size_t slot) const {
    const double *p = coords_.data() + slot * dim_;
    double sum = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        const double diff = query[d] - p[d];
        sum += diff * diff;
    }
    return sum;
}

void KdTree::check_query(std::span<const double> query) const {
    if (query.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "query has dimension " + std::to_string(query.size()) +
                            ", index has " + std::to_string(dim_));
    }
}

void KdTree::radius_recurse(std::int32_t id, std::span<const double> query,
                            double radius_sq, std::vector<Neighbor> &out) const {
    const Node &node = nodes_[id];
    if (node.left < 0) {
        for (std::uint32_t s = node.begin; s < node.end; ++s) {
            const double d2 = squared_distance(query, s);
            if (d2 <= radius_sq) out.push_back({order_[s], d2});
        }
        return;
    }
    const double diff = query[node.split_dim] - node.split_value;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    radius_recurse(near, query, radius_sq, out);
    if (diff * diff <= radius_sq) radius_recurse(far, query, radius_sq, out);
}

std::vector<Neighbor> KdTree::radius_search(std::span<const double> query,
                                            double radius) const {
    check_query(query);
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::InvalidParameter, "radius must be positive");
    }
    std::vector<Neighbor> out;
    if (empty()) return out;
    radius_recurse(0, query, radius * radius, out);
    // `distance` holds the squared distance until here.
    std::sort(out.begin(), out.end(), [](const Neighbor &a, const Neighbor &b) {
        return a.distance < b.distance ||
               (a.distance == b.distance && a.index < b.index);
    });
    for (auto &n : out) n.distance = std::sqrt(n.distance);
    return out;
}

std::vector<Neighbor> KdTree::radius_search(const Vec3 &query,
                                            double radius) const {
    const double q[3] = {query.x(), query.y(), query.z()};
    return radius_search(std::span<const double>(q, 3), radius);
}

void KdTree::nearest_recurse(std::int32_t id, std::span<const double> query,
                             double &best_sq, std::size_t &best_index) const {
    const Node &node = nodes_[id];
    if (node.left < 0) {
        for (std::uint32_t s = node.begin; s < node.end; ++s) {
            const double d2 = squared_distance(query, s);
            if (d2 < best_sq || (d2 == best_sq && order_[s] < best_index)) {
                best_sq = d2;
                best_index = order_[s];
            }
        }
        return;
    }
    const double diff = query[node.split_dim] - node.split_value;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    nearest_recurse(near, query, best_sq, best_index);
    if (diff * diff <= best_sq) nearest_recurse(far, query, best_sq, best_index);
}

Neighbor KdTree::nearest(std::span<const double> query) const {
    check_query(query);
    if (empty()) throw Error(ErrorCode::EmptyIndex, "nearest on empty index");
    double best_sq = std::numeric_limits<double>::infinity();
    std::size_t best_index = std::numeric_limits<std::size_t>::max();
    nearest_recurse(0, query, best_sq, best_index);
    return {best_index, std::sqrt(best_sq)};
}

Neighbor KdTree::nearest(const Vec3 &query) const {
    const double q[3] = {query.x(), query.y(), query.z()};
    return nearest(std::span<const double>(q, 3));
}

std::optional<Neighbor> KdTree::nearest_within(std::span<const double> query,
                                               double max_distance) const {
    check_query(query);
    if (empty()) return std::nullopt;
    double best_sq = max_distance * max_distance;
    std::size_t best_index = std::numeric_limits<std::size_t>::max();
    nearest_recurse(0, query, best_sq, best_index);
    if (best_index == std::numeric_limits<std::size_t>::max()) {
        return std::nullopt;
    }
    return Neighbor{best_index, std::sqrt(best_sq)};
}

std::optional<Neighbor> KdTree::nearest_within(const Vec3 &query,
                                               double max_distance) const {
    const double q[3] = {query.x(), query.y(), query.z()};
    return nearest_within(std::span<const double>(q, 3), max_distance);
}

}  // namespace posekit::geometry
