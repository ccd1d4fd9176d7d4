#pragma once
#include <string>
#include <vector>

namespace geo {

struct Point {
    double x = 0;
    double y = 0;
};

class Shape {
public:
    virtual ~Shape() = default;
    virtual double area() const = 0;
    std::string name() const { return label_; }

protected:
    std::string label_;
};

class Polygon : public Shape {
public:
    explicit Polygon(std::vector<Point> pts);
    double area() const override;
    double perimeter() const;

private:
    std::vector<Point> pts_;
};

double distance(const Point& a, const Point& b);

}  // namespace geo
