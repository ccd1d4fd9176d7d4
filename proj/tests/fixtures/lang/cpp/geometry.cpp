#include "geometry.hpp"

#include <cmath>

namespace geo {

Polygon::Polygon(std::vector<Point> pts) : Shape(), pts_(std::move(pts)) {
    label_ = "polygon";
}

double Polygon::area() const {
    double sum = 0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        const Point& a = pts_[i];
        const Point& b = pts_[(i + 1) % pts_.size()];
        sum += a.x * b.y - b.x * a.y;
    }
    return std::abs(sum) / 2.0;
}

double Polygon::perimeter() const {
    double total = 0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        total += distance(pts_[i], pts_[(i + 1) % pts_.size()]);
    }
    return total;
}

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace geo
