#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pathtrans/expr.hpp"

namespace pathtrans {

using Point = std::vector<double>;
using Vector = std::vector<double>;

/// Single chart with a constant diagonal metric.
class ChartedSpace {
public:
    ChartedSpace(std::vector<std::string> names, std::vector<double> metric_diag);

    /// dim 4, (x0, x1, x2, x3), Minkowski diag(+1, -1, -1, -1).
    static ChartedSpace minkowski4();
    static ChartedSpace euclidean(std::size_t dim);

    std::size_t dim() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& metric_diag() const { return metric_; }
    const std::vector<double>& inverse_metric_diag() const { return inverse_metric_; }

    std::size_t index_of(const std::string& name) const;
    void check_point(const Point& p) const;

    bool operator==(const ChartedSpace& other) const {
        return names_ == other.names_ && metric_ == other.metric_;
    }

private:
    std::vector<std::string> names_;
    std::vector<double> metric_;
    std::vector<double> inverse_metric_;
};

/// Component-wise division by the diagonal metric.
Vector raise_index(const ChartedSpace& space, const Vector& covector);

/// Parametrized C^1 path (or piecewise-linear polyline) on a chart. Expression
/// components are functions of the parameter `s`.
class PathCurve {
public:
    enum class Kind { Expression, Polyline };

    static constexpr const char* kParameter = "s";

    static PathCurve expression(const ChartedSpace& space, std::vector<Expression> components, double s_min,
                                double s_max);
    static PathCurve expression(const ChartedSpace& space, const std::vector<std::string>& components,
                                double s_min, double s_max);
    static PathCurve polyline(const ChartedSpace& space, std::vector<Point> vertices, double s_min, double s_max);

    Kind kind() const { return kind_; }
    const ChartedSpace& space() const { return *space_; }
    double s_min() const { return s_min_; }
    double s_max() const { return s_max_; }
    const std::string& id() const { return id_; }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Expression>& components() const { return components_; }

    Point eval(double s) const;

    /// Tangent; at an interior polyline vertex the right segment wins, at s_max the last one.
    Vector tangent(double s) const;

    /// Tangent restricted to smooth piece `piece` (see pieces()). Used by the
    /// integrators so both ends of a polyline segment see that segment's direction.
    Vector tangent_on_piece(double s, std::size_t piece) const;

    /// Parameter breakpoints splitting the domain into smooth pieces:
    /// {s_min, s_max} for expression paths, every vertex parameter for polylines.
    std::vector<double> breakpoints() const;

    /// Index of the smooth piece containing the open interval between a and b.
    std::size_t piece_between(double a, double b) const;

    bool contains(double s) const { return s >= s_min_ && s <= s_max_; }

private:
    PathCurve() = default;
    void check_parameter(double s) const;
    double vertex_parameter(std::size_t i) const;

    std::shared_ptr<const ChartedSpace> space_;
    Kind kind_ = Kind::Expression;
    double s_min_ = 0.0;
    double s_max_ = 1.0;
    std::string id_;
    std::vector<Expression> components_;
    std::vector<Program> programs_;
    std::vector<Program> derivative_programs_;
    std::vector<Point> vertices_;
};

}  // namespace pathtrans
