#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace sobtrace {

using Point = std::vector<double>;

struct Box {
    Point lo;
    Point hi;
};

struct Segment {
    double ax, ay, bx, by;
};

// Circle arc with angular windows removed; each window is (centre angle, half width).
struct Arc {
    double cx, cy, r;
    std::vector<std::pair<double, double>> excluded;
};

// Thin feature of a truncated infinite construction, e.g. the k-th passage width.
struct FeatureScale {
    int k;
    double size;
};

class Domain {
public:
    virtual ~Domain() = default;

    virtual std::string tag() const = 0;
    virtual int dim() const = 0;
    virtual Box bbox() const = 0;
    virtual bool inside(std::span<const double> x) const = 0;
    // Distance to the boundary; only meaningful for inside points.
    virtual double exact_distance(std::span<const double> x) const = 0;
    virtual std::optional<double> exact_measure() const = 0;
    virtual nlohmann::json params() const { return nlohmann::json::object(); }
    virtual int k_max() const { return 0; }

    // Partition into subdomains used by perimeter superadditivity.
    virtual int part_count() const { return 1; }
    virtual int part_of(std::span<const double> x) const { return inside(x) ? 0 : -1; }

    // Boundary points of measure zero that the inside predicate does not see.
    virtual std::vector<Point> isolated_boundary_points() const { return {}; }

    // Planar line art of the boundary.
    virtual std::vector<Segment> segments() const { return {}; }
    virtual std::vector<Arc> arcs() const { return {}; }

    virtual std::vector<FeatureScale> feature_scales() const { return {}; }

    // Vertices, piece midpoints and `per_piece` uniform samples on every boundary piece.
    virtual std::vector<Point> boundary_samples(int per_piece) const;

    nlohmann::json descriptor() const;
};

using DomainPtr = std::shared_ptr<const Domain>;

inline constexpr int kDefaultKMax = 12;

DomainPtr unit_cube(int N);
DomainPtr punctured_ball(int N);
DomainPtr rooms_and_passages(int k_max = kDefaultKMax);
DomainPtr squares_stack(int k_max = kDefaultKMax);
DomainPtr crocodile(int k_max = kDefaultKMax);
DomainPtr skyscrapers(int k_max = kDefaultKMax);
// (0,1) x (0,a)
DomainPtr rectangle(double a);

// Gallery lookup: cube<N>, punctured_ball<N>, rooms_and_passages, squares_stack,
// crocodile, skyscrapers, rectangle (a = 1/2).
DomainPtr make_gallery_domain(const std::string& tag, int k_max = kDefaultKMax);
DomainPtr domain_from_descriptor(const nlohmann::json& descriptor);
std::vector<std::string> gallery_tags();

// Exact distance; throws std::invalid_argument for points outside the domain.
double distance(const Domain& dom, std::span<const double> x);

// Rooms layout accessors (centre abscissa, radius, passage width).
double room_center(int k);
double room_radius(int k);
double passage_width(int k);

// Squares-stack geometry: I_k = (left, right), square height = right - left.
std::pair<double, double> squares_interval(int k);
// Centre of the gap between I_k and I_{k-1}, k >= 2, and the ball radius 2^-k - 2^-2k.
Point squares_gap_point(int k);
double squares_gap_radius(int k);

// Exact planar distance helpers.
double segment_distance(const Segment& s, double x, double y);
double arc_distance(const Arc& a, double x, double y);

// ---------------------------------------------------------------------------

enum class DistanceMode { Exact, Grid };

struct RasterOptions {
    DistanceMode distance = DistanceMode::Exact;
    bool keep_largest_component = true;
};

// Cell-centre rasterization of a domain, dimensions 1 to 3.
class GridDomain {
public:
    DomainPtr domain;
    int dim = 0;
    double h = 0.0;
    bool h_adjusted = false;
    int n[3] = {1, 1, 1};
    double origin[3] = {0.0, 0.0, 0.0};
    std::vector<std::uint8_t> inside;     // per cell
    std::vector<double> dist;             // per cell, NaN outside
    std::vector<std::size_t> inside_cells;
    double grid_measure = 0.0;
    std::optional<double> exact_measure;
    double dropped_measure = 0.0;         // measure removed with disconnected islands
    int resolved_depth = 0;
    std::vector<std::string> warnings;
    DistanceMode distance_mode = DistanceMode::Exact;

    std::size_t cell_count() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
    double cell_measure() const;
    std::size_t index(int i, int j = 0, int k = 0) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }
    void unindex(std::size_t idx, int& i, int& j, int& k) const;
    Point center(std::size_t idx) const;
    // Face neighbour along axis in direction dir (+1/-1); -1 when off the grid.
    long neighbor(std::size_t idx, int axis, int dir) const;
    bool is_inside(long idx) const { return idx >= 0 && inside[static_cast<std::size_t>(idx)] != 0; }
    // Inside cell with at least one face neighbour outside.
    bool boundary_adjacent(std::size_t idx) const;
};

GridDomain rasterize(DomainPtr dom, double h, const RasterOptions& opts = {});

void write_grid_csv(std::ostream& out, const GridDomain& gd);

}  // namespace sobtrace
