#include "se3diffreg/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace se3diffreg {

namespace {
constexpr int kLeafSize = 8;
}

KdTree3::KdTree3(const std::vector<Vec3>& points, std::size_t brute_force_below)
    : points_(&points) {
    if (points.empty()) {
        throw std::invalid_argument("KdTree3 needs at least one point");
    }
    order_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        order_[i] = static_cast<int>(i);
    }
    brute_ = points.size() < brute_force_below;
    if (!brute_) {
        nodes_.reserve(2 * points.size() / kLeafSize + 2);
        build(0, static_cast<int>(points.size()));
    }
}

int KdTree3::build(int begin, int end) {
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[node_index].begin = begin;
        nodes_[node_index].end = end;
        return node_index;
    }

    Vec3 lo = (*points_)[static_cast<std::size_t>(order_[begin])];
    Vec3 hi = lo;
    for (int i = begin + 1; i < end; ++i) {
        const Vec3& p = (*points_)[static_cast<std::size_t>(order_[i])];
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [this, axis](int a, int b) {
                         const double pa = (*points_)[static_cast<std::size_t>(a)][axis];
                         const double pb = (*points_)[static_cast<std::size_t>(b)][axis];
                         if (pa != pb) {
                             return pa < pb;
                         }
                         return a < b;
                     });

    nodes_[node_index].axis = axis;
    nodes_[node_index].split = (*points_)[static_cast<std::size_t>(order_[mid])][axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    return node_index;
}

void KdTree3::scan_range(int begin, int end, const Vec3& q, int& best_index,
                         double& best_d2) const {
    for (int i = begin; i < end; ++i) {
        const int idx = order_[i];
        const double d2 = ((*points_)[static_cast<std::size_t>(idx)] - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && idx < best_index)) {
            best_d2 = d2;
            best_index = idx;
        }
    }
}

void KdTree3::search(int node, const Vec3& q, int& best_index, double& best_d2) const {
    const Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.axis < 0) {
        scan_range(n.begin, n.end, q, best_index, best_d2);
        return;
    }
    const double delta = q[n.axis] - n.split;
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    search(near, q, best_index, best_d2);
    // <= keeps equal-distance candidates reachable for the index tie-break.
    if (delta * delta <= best_d2) {
        search(far, q, best_index, best_d2);
    }
}

std::pair<int, double> KdTree3::nearest(const Vec3& q) const {
    int best_index = std::numeric_limits<int>::max();
    double best_d2 = std::numeric_limits<double>::infinity();
    if (brute_) {
        scan_range(0, static_cast<int>(order_.size()), q, best_index, best_d2);
    } else {
        search(0, q, best_index, best_d2);
    }
    return {best_index, best_d2};
}

}  // namespace se3diffreg
