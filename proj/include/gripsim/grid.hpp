#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gripsim/vec2.hpp"

namespace gripsim {

// Uniform binning over a fixed rectangle. Points outside the bounds are
// clamped into the border cells, so queries stay correct for stragglers.
// Iteration order is fixed by construction (counting sort, ascending point
// index within a cell), which keeps downstream force sums deterministic.
class UniformGrid {
public:
    UniformGrid(const Vec2& lo, const Vec2& hi, double cell_size)
        : lo_(lo), cell_(cell_size) {
        if (!(cell_size > 0.0)) throw std::invalid_argument("grid cell_size must be positive");
        if (!(hi.x > lo.x) || !(hi.y > lo.y))
            throw std::invalid_argument("grid bounds must have positive extent");
        nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / cell_size)));
        ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / cell_size)));
        start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    }

    double cell_size() const { return cell_; }

    void build(const std::vector<Vec2>& pts) {
        const std::size_t ncell = static_cast<std::size_t>(nx_) * ny_;
        std::fill(start_.begin(), start_.end(), 0);
        cell_of_.resize(pts.size());
        order_.resize(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cell_of_[i] = cell_index(pts[i]);
            ++start_[cell_of_[i] + 1];
        }
        for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
        std::vector<int> cursor(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i)
            order_[static_cast<std::size_t>(cursor[cell_of_[i]]++)] = static_cast<int>(i);
    }

    // Visits each unordered candidate pair once as f(i, j) with i < j.
    // Candidates are points in the same or adjacent cells.
    template <class F>
    void for_candidate_pairs(F&& f) const {
        for (int cy = 0; cy < ny_; ++cy) {
            for (int cx = 0; cx < nx_; ++cx) {
                const std::size_t c = static_cast<std::size_t>(cy) * nx_ + cx;
                const int b0 = start_[c], e0 = start_[c + 1];
                if (b0 == e0) continue;
                for (int a = b0; a < e0; ++a)
                    for (int b = a + 1; b < e0; ++b)
                        emit(f, order_[a], order_[b]);
                // forward neighbors: E, NW, N, NE
                visit_cell_pair(f, b0, e0, cx + 1, cy);
                visit_cell_pair(f, b0, e0, cx - 1, cy + 1);
                visit_cell_pair(f, b0, e0, cx, cy + 1);
                visit_cell_pair(f, b0, e0, cx + 1, cy + 1);
            }
        }
    }

    // Visits every point whose cell intersects the rectangle [lo, hi].
    template <class F>
    void for_points_in_box(const Vec2& lo, const Vec2& hi, F&& f) const {
        const int x0 = std::clamp(cell_x(lo.x), 0, nx_ - 1);
        const int x1 = std::clamp(cell_x(hi.x), 0, nx_ - 1);
        const int y0 = std::clamp(cell_y(lo.y), 0, ny_ - 1);
        const int y1 = std::clamp(cell_y(hi.y), 0, ny_ - 1);
        for (int cy = y0; cy <= y1; ++cy)
            for (int cx = x0; cx <= x1; ++cx) {
                const std::size_t c = static_cast<std::size_t>(cy) * nx_ + cx;
                for (int a = start_[c]; a < start_[c + 1]; ++a) f(order_[a]);
            }
    }

private:
    int cell_x(double x) const {
        return std::clamp(static_cast<int>(std::floor((x - lo_.x) / cell_)), 0, nx_ - 1);
    }
    int cell_y(double y) const {
        return std::clamp(static_cast<int>(std::floor((y - lo_.y) / cell_)), 0, ny_ - 1);
    }
    std::size_t cell_index(const Vec2& p) const {
        return static_cast<std::size_t>(cell_y(p.y)) * nx_ + cell_x(p.x);
    }

    template <class F>
    static void emit(F&& f, int i, int j) {
        if (i < j) f(i, j);
        else f(j, i);
    }

    template <class F>
    void visit_cell_pair(F&& f, int b0, int e0, int cx, int cy) const {
        if (cx < 0 || cx >= nx_ || cy < 0 || cy >= ny_) return;
        const std::size_t c = static_cast<std::size_t>(cy) * nx_ + cx;
        for (int a = b0; a < e0; ++a)
            for (int b = start_[c]; b < start_[c + 1]; ++b)
                emit(f, order_[a], order_[b]);
    }

    Vec2 lo_;
    double cell_;
    int nx_ = 0, ny_ = 0;
    std::vector<int> start_;
    std::vector<std::size_t> cell_of_;
    std::vector<int> order_;
};

} // namespace gripsim
