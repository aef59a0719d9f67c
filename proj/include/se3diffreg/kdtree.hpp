#pragma once

#include <utility>
#include <vector>

#include "se3diffreg/types.hpp"

namespace se3diffreg {

/// Static 3D nearest-neighbor index. Builds a median-split k-d tree for
/// clouds of at least `brute_force_below` points and scans linearly for
/// smaller clouds. Equal-distance ties always resolve to the lowest point
/// index, on both paths, so matching is deterministic.
class KdTree3 {
public:
    explicit KdTree3(const std::vector<Vec3>& points, std::size_t brute_force_below = 1000);

    /// (point index, squared distance) of the nearest point to q.
    std::pair<int, double> nearest(const Vec3& q) const;

    std::size_t size() const { return points_->size(); }

private:
    struct Node {
        int axis = -1;        // -1 marks a leaf
        double split = 0.0;
        int left = -1;
        int right = -1;
        int begin = 0;        // leaf range into order_
        int end = 0;
    };

    int build(int begin, int end);
    void search(int node, const Vec3& q, int& best_index, double& best_d2) const;
    void scan_range(int begin, int end, const Vec3& q, int& best_index, double& best_d2) const;

    const std::vector<Vec3>* points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    bool brute_ = false;
};

}  // namespace se3diffreg
