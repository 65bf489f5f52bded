#include "mati/simulator/history.hpp"

#include <cmath>
#include <stdexcept>

namespace mati {

HistoryBuffer::HistoryBuffer(double t0, double step, InitialFn initial, std::size_t keep)
    : t0_(t0), h_(step), initial_(std::move(initial)), keep_(keep) {
    if (!(step > 0.0)) throw std::invalid_argument("history: step must be positive");
    if (!initial_) throw std::invalid_argument("history: missing initial function");
    if (keep_ != 0 && keep_ < 2) keep_ = 2;
}

const HistoryBuffer::Node& HistoryBuffer::get(std::size_t node) const {
    if (node < first_ || node >= size()) throw std::out_of_range("history: node not retained");
    return nodes_[node - first_];
}

HistoryBuffer::Node& HistoryBuffer::get(std::size_t node) {
    if (node < first_ || node >= size()) throw std::out_of_range("history: node not retained");
    return nodes_[node - first_];
}

void HistoryBuffer::push(const Vec& left, const Vec& right) {
    nodes_.push_back(Node{left, right, Vec(), Vec(), false, false, {}});
    if (keep_ != 0 && nodes_.size() > keep_) {
        nodes_.pop_front();
        ++first_;
    }
}

void HistoryBuffer::set_left_derivative(std::size_t node, const Vec& dy) {
    auto& n = get(node);
    n.dy_left = dy;
    n.has_dy_left = true;
}

void HistoryBuffer::set_right_derivative(std::size_t node, const Vec& dy) {
    auto& n = get(node);
    n.dy_right = dy;
    n.has_dy_right = true;
}

void HistoryBuffer::add_breakpoint(std::size_t node, double t, const Vec& y, const Vec& dy_left,
                                   const Vec& dy_right) {
    auto& n = get(node);
    const double lo = n.inner.empty() ? time(node) : n.inner.back().t;
    if (!(t > lo && t < time(node) + h_)) throw std::invalid_argument("history: breakpoint outside its step");
    n.inner.push_back(Breakpoint{t, y, dy_left, dy_right});
}

namespace {

Vec hermite(double s, double ta, const Vec& ya, const Vec& da, double tb, const Vec& yb, const Vec& db) {
    const double len = tb - ta, th = (s - ta) / len;
    const double t2 = th * th, t3 = t2 * th;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + th;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * ya + (h10 * len) * da + h01 * yb + (h11 * len) * db;
}

}  // namespace

Vec HistoryBuffer::at(double s) const {
    if (s < t0_) return initial_(s);
    if (nodes_.empty()) throw std::logic_error("history: empty buffer");
    double u = (s - t0_) / h_;
    // times within rounding of a node are that node (its right value), so event times computed
    // as t + h and lookups landing an ulp short of a jump still see the post-jump state
    if (const double un = std::round(u); std::abs(u - un) < 1e-9) u = un;
    const double last = static_cast<double>(size() - 1);
    if (u > last + 1e-9) throw std::out_of_range("history: lookup beyond stored span");
    if (u >= last) return nodes_.back().y_right;
    auto k = static_cast<std::size_t>(std::floor(u));
    if (k < first_) throw std::out_of_range("history under-run: delay exceeds retained span");
    const Node& a = nodes_[k - first_];
    const double th = u - static_cast<double>(k);
    if (th <= 0.0) return a.y_right;
    const Node& b = nodes_[k + 1 - first_];
    if (!a.has_dy_right || !b.has_dy_left) return a.y_right + th * (b.y_left - a.y_right);
    const double ta = time(k), tb = time(k + 1);
    if (a.inner.empty()) return hermite(s, ta, a.y_right, a.dy_right, tb, b.y_left, b.dy_left);
    // piecewise between the node, the breakpoints and the next node
    std::size_t j = 0;
    while (j < a.inner.size() && a.inner[j].t <= s) ++j;
    const double t_lo = j == 0 ? ta : a.inner[j - 1].t;
    const Vec& y_lo = j == 0 ? a.y_right : a.inner[j - 1].y;
    const Vec& d_lo = j == 0 ? a.dy_right : a.inner[j - 1].dy_right;
    if (j == a.inner.size()) return hermite(s, t_lo, y_lo, d_lo, tb, b.y_left, b.dy_left);
    return hermite(s, t_lo, y_lo, d_lo, a.inner[j].t, a.inner[j].y, a.inner[j].dy_left);
}

}  // namespace mati
