#pragma once

#include <cstddef>
#include <deque>
#include <vector>
#include <functional>

#include "mati/core/types.hpp"

namespace mati {

// Uniform-grid record of a piecewise-smooth trajectory with jumps at nodes.
// Each node keeps left and right limits (value and derivative); between nodes the
// trajectory is a cubic Hermite segment, or linear where a derivative is unknown.
// Times before t0 are served by the initial history function.
class HistoryBuffer {
public:
    using InitialFn = std::function<Vec(double)>;

    HistoryBuffer(double t0, double step, InitialFn initial, std::size_t keep = 0);

    // Appends the next node at t0 + size()*step.
    void push(const Vec& left, const Vec& right);
    void set_left_derivative(std::size_t node, const Vec& dy);
    void set_right_derivative(std::size_t node, const Vec& dy);
    // Breakpoint strictly inside the step that starts at `node` (a kink where the step was
    // split); lookups in that step then interpolate piecewise. Add in increasing time.
    void add_breakpoint(std::size_t node, double t, const Vec& y, const Vec& dy_left, const Vec& dy_right);

    // Right-continuous evaluation for s <= back_time().
    Vec at(double s) const;

    std::size_t size() const { return first_ + nodes_.size(); }
    double t0() const { return t0_; }
    double step() const { return h_; }
    double time(std::size_t node) const { return t0_ + h_ * static_cast<double>(node); }
    double back_time() const { return time(size() - 1); }
    const Vec& left(std::size_t node) const { return get(node).y_left; }
    const Vec& right(std::size_t node) const { return get(node).y_right; }
    const Vec& back() const { return nodes_.back().y_right; }
    std::size_t first_retained() const { return first_; }

private:
    struct Breakpoint {
        double t;
        Vec y, dy_left, dy_right;
    };
    struct Node {
        Vec y_left, y_right, dy_left, dy_right;
        bool has_dy_left = false, has_dy_right = false;
        std::vector<Breakpoint> inner;  // kinks inside the step to the next node
    };
    const Node& get(std::size_t node) const;
    Node& get(std::size_t node);

    double t0_, h_;
    InitialFn initial_;
    std::size_t keep_;   // 0 keeps everything
    std::size_t first_ = 0;
    std::deque<Node> nodes_;
};

}  // namespace mati
