#include "sobtrace/domains.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace sobtrace {

namespace {

constexpr double kPi = std::numbers::pi;

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double unit_ball_volume(int N) {
    return std::pow(kPi, N / 2.0) / std::tgamma(N / 2.0 + 1.0);
}

double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    return a - kPi;
}

bool in_window(const Arc& arc, double theta) {
    for (const auto& [c, hw] : arc.excluded)
        if (std::abs(wrap_angle(theta - c)) < hw) return true;
    return false;
}

class CubeDomain final : public Domain {
public:
    explicit CubeDomain(int N) : N_(N) {
        if (N < 1) throw std::invalid_argument("unit_cube needs N >= 1");
    }
    std::string tag() const override { return "cube" + std::to_string(N_); }
    int dim() const override { return N_; }
    Box bbox() const override { return {Point(N_, 0.0), Point(N_, 1.0)}; }
    bool inside(std::span<const double> x) const override {
        for (double v : x)
            if (!(v > 0.0 && v < 1.0)) return false;
        return true;
    }
    double exact_distance(std::span<const double> x) const override {
        double d = kInfDist;
        for (double v : x) d = std::min({d, v, 1.0 - v});
        return d;
    }
    std::optional<double> exact_measure() const override { return 1.0; }
    nlohmann::json params() const override { return {{"N", N_}}; }
    std::vector<Segment> segments() const override {
        if (N_ != 2) return {};
        return {{0, 0, 1, 0}, {1, 0, 1, 1}, {1, 1, 0, 1}, {0, 1, 0, 0}};
    }
    std::vector<Point> boundary_samples(int per_piece) const override {
        if (N_ == 2) return Domain::boundary_samples(per_piece);
        std::vector<Point> pts;
        for (int i = 0; i < N_; ++i)
            for (double side : {0.0, 1.0}) {
                Point p(N_, 0.5);
                p[i] = side;
                pts.push_back(p);
            }
        if (N_ <= 3) {
            for (int mask = 0; mask < (1 << N_); ++mask) {
                Point p(N_);
                for (int i = 0; i < N_; ++i) p[i] = (mask >> i) & 1;
                pts.push_back(p);
            }
        }
        return pts;
    }

private:
    static constexpr double kInfDist = 1e300;
    int N_;
};

class PuncturedBallDomain final : public Domain {
public:
    explicit PuncturedBallDomain(int N) : N_(N) {
        if (N < 2) throw std::invalid_argument("punctured_ball needs N >= 2");
    }
    std::string tag() const override { return "punctured_ball" + std::to_string(N_); }
    int dim() const override { return N_; }
    Box bbox() const override { return {Point(N_, -1.0), Point(N_, 1.0)}; }
    bool inside(std::span<const double> x) const override {
        const double r = norm(x);
        return r < 1.0 && r > 0.0;
    }
    double exact_distance(std::span<const double> x) const override {
        const double r = norm(x);
        return std::min(1.0 - r, r);
    }
    std::optional<double> exact_measure() const override { return unit_ball_volume(N_); }
    nlohmann::json params() const override { return {{"N", N_}}; }
    std::vector<Point> isolated_boundary_points() const override { return {Point(N_, 0.0)}; }
    std::vector<Arc> arcs() const override {
        if (N_ != 2) return {};
        return {{0.0, 0.0, 1.0, {}}};
    }
    std::vector<Point> boundary_samples(int per_piece) const override {
        std::vector<Point> pts;
        if (N_ == 2) {
            pts = Domain::boundary_samples(per_piece);
        } else {
            for (int i = 0; i < N_; ++i)
                for (double s : {-1.0, 1.0}) {
                    Point p(N_, 0.0);
                    p[i] = s;
                    pts.push_back(p);
                }
        }
        pts.push_back(Point(N_, 0.0));
        return pts;
    }

private:
    int N_;
};

// Simple polygon given counter-clockwise, with an optional partition rule.
class PolygonDomain : public Domain {
public:
    PolygonDomain(std::string tag, std::vector<std::pair<double, double>> vertices, int k_max,
                  nlohmann::json params, std::function<int(double, double)> part_fn, int parts,
                  std::vector<FeatureScale> features)
        : tag_(std::move(tag)),
          v_(std::move(vertices)),
          k_max_(k_max),
          params_(std::move(params)),
          part_fn_(std::move(part_fn)),
          parts_(parts),
          features_(std::move(features)) {
        lo_ = {1e300, 1e300};
        hi_ = {-1e300, -1e300};
        for (const auto& [x, y] : v_) {
            lo_[0] = std::min(lo_[0], x);
            lo_[1] = std::min(lo_[1], y);
            hi_[0] = std::max(hi_[0], x);
            hi_[1] = std::max(hi_[1], y);
        }
        double a = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const auto& [x0, y0] = v_[i];
            const auto& [x1, y1] = v_[(i + 1) % v_.size()];
            a += x0 * y1 - x1 * y0;
            segs_.push_back({x0, y0, x1, y1});
        }
        area_ = 0.5 * a;
    }
    std::string tag() const override { return tag_; }
    int dim() const override { return 2; }
    Box bbox() const override { return {lo_, hi_}; }
    bool inside(std::span<const double> p) const override {
        const double x = p[0], y = p[1];
        if (x <= lo_[0] || x >= hi_[0] || y <= lo_[1] || y >= hi_[1]) return false;
        bool in = false;
        for (const auto& s : segs_) {
            if ((s.ay > y) != (s.by > y)) {
                const double xc = s.ax + (y - s.ay) * (s.bx - s.ax) / (s.by - s.ay);
                if (x < xc) in = !in;
            }
        }
        if (!in) return false;
        // points on the boundary itself are excluded
        return exact_distance(p) > 0.0;
    }
    double exact_distance(std::span<const double> p) const override {
        double d = 1e300;
        for (const auto& s : segs_) d = std::min(d, segment_distance(s, p[0], p[1]));
        return d;
    }
    std::optional<double> exact_measure() const override { return area_; }
    nlohmann::json params() const override { return params_; }
    int k_max() const override { return k_max_; }
    int part_count() const override { return parts_; }
    int part_of(std::span<const double> p) const override {
        if (!inside(p)) return -1;
        return part_fn_ ? part_fn_(p[0], p[1]) : 0;
    }
    std::vector<Segment> segments() const override { return segs_; }
    std::vector<FeatureScale> feature_scales() const override { return features_; }

private:
    std::string tag_;
    std::vector<std::pair<double, double>> v_;
    std::vector<Segment> segs_;
    Point lo_, hi_;
    double area_ = 0.0;
    int k_max_;
    nlohmann::json params_;
    std::function<int(double, double)> part_fn_;
    int parts_;
    std::vector<FeatureScale> features_;
};

class RectangleDomain final : public Domain {
public:
    explicit RectangleDomain(double a) : a_(a) {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("rectangle height a must lie in (0,1)");
    }
    std::string tag() const override { return "rectangle"; }
    int dim() const override { return 2; }
    Box bbox() const override { return {{0.0, 0.0}, {1.0, a_}}; }
    bool inside(std::span<const double> x) const override {
        return x[0] > 0.0 && x[0] < 1.0 && x[1] > 0.0 && x[1] < a_;
    }
    double exact_distance(std::span<const double> x) const override {
        return std::min({x[0], 1.0 - x[0], x[1], a_ - x[1]});
    }
    std::optional<double> exact_measure() const override { return a_; }
    nlohmann::json params() const override { return {{"a", a_}}; }
    std::vector<Segment> segments() const override {
        return {{0, 0, 1, 0}, {1, 0, 1, a_}, {1, a_, 0, a_}, {0, a_, 0, 0}};
    }

private:
    double a_;
};

// Area of {|y| < w/2, x > 0, x^2 + y^2 < r^2}.
double half_lens_area(double r, double w) {
    const double y = 0.5 * w;
    return y * std::sqrt(r * r - y * y) + r * r * std::asin(y / r);
}

class RoomsDomain final : public Domain {
public:
    explicit RoomsDomain(int k_max) : k_max_(k_max) {
        if (k_max < 1) throw std::invalid_argument("rooms_and_passages needs k_max >= 1");
        for (int k = 1; k <= k_max_; ++k) {
            Arc a{room_center(k), 0.0, room_radius(k), {}};
            if (k < k_max_) a.excluded.push_back({0.0, std::asin(passage_width(k) / (2.0 * room_radius(k)))});
            if (k > 1) a.excluded.push_back({kPi, std::asin(passage_width(k - 1) / (2.0 * room_radius(k)))});
            arcs_.push_back(a);
        }
        for (int k = 1; k < k_max_; ++k) {
            const double w = passage_width(k);
            const double x0 = room_center(k) + std::sqrt(room_radius(k) * room_radius(k) - 0.25 * w * w);
            const double x1 = room_center(k + 1) - std::sqrt(room_radius(k + 1) * room_radius(k + 1) - 0.25 * w * w);
            segs_.push_back({x0, 0.5 * w, x1, 0.5 * w});
            segs_.push_back({x1, -0.5 * w, x0, -0.5 * w});
        }
        measure_ = 0.0;
        for (int k = 1; k <= k_max_; ++k) measure_ += kPi * room_radius(k) * room_radius(k);
        for (int k = 1; k < k_max_; ++k) {
            const double w = passage_width(k);
            measure_ += w * (room_center(k + 1) - room_center(k)) - half_lens_area(room_radius(k), w) -
                        half_lens_area(room_radius(k + 1), w);
        }
    }
    std::string tag() const override { return "rooms_and_passages"; }
    int dim() const override { return 2; }
    Box bbox() const override {
        return {{0.0, -0.5}, {room_center(k_max_) + room_radius(k_max_), 0.5}};
    }
    bool inside(std::span<const double> p) const override {
        const double x = p[0], y = p[1];
        for (int k = 1; k <= k_max_; ++k) {
            const double dx = x - room_center(k), r = room_radius(k);
            if (dx * dx + y * y < r * r) return true;
        }
        for (int k = 1; k < k_max_; ++k)
            if (x > room_center(k) && x < room_center(k + 1) && std::abs(y) < 0.5 * passage_width(k)) return true;
        return false;
    }
    double exact_distance(std::span<const double> p) const override {
        double d = 1e300;
        for (const auto& a : arcs_) d = std::min(d, arc_distance(a, p[0], p[1]));
        for (const auto& s : segs_) d = std::min(d, segment_distance(s, p[0], p[1]));
        return d;
    }
    std::optional<double> exact_measure() const override { return measure_; }
    nlohmann::json params() const override {
        return {{"layout", "collinear"},
                {"room_radius", "2^-k"},
                {"room_center", "c_1 = 1/2, c_{k+1} = c_k + 2^-k + 2^-k + 2^-(k+1)"},
                {"passage_width", "2^-4k"},
                {"passage_length", "2^-k"}};
    }
    int k_max() const override { return k_max_; }
    int part_count() const override { return 2 * k_max_ - 1; }
    int part_of(std::span<const double> p) const override {
        const double x = p[0], y = p[1];
        for (int k = 1; k <= k_max_; ++k) {
            const double dx = x - room_center(k), r = room_radius(k);
            if (dx * dx + y * y < r * r) return k - 1;
        }
        for (int k = 1; k < k_max_; ++k)
            if (x > room_center(k) && x < room_center(k + 1) && std::abs(y) < 0.5 * passage_width(k))
                return k_max_ + k - 1;
        return -1;
    }
    std::vector<Segment> segments() const override { return segs_; }
    std::vector<Arc> arcs() const override { return arcs_; }
    std::vector<FeatureScale> feature_scales() const override {
        std::vector<FeatureScale> f;
        for (int k = 1; k < k_max_; ++k) f.push_back({k, passage_width(k)});
        return f;
    }

private:
    int k_max_;
    std::vector<Arc> arcs_;
    std::vector<Segment> segs_;
    double measure_;
};

}  // namespace

double segment_distance(const Segment& s, double x, double y) {
    const double dx = s.bx - s.ax, dy = s.by - s.ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((x - s.ax) * dx + (y - s.ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(x - (s.ax + t * dx), y - (s.ay + t * dy));
}

double arc_distance(const Arc& a, double x, double y) {
    const double rho = std::hypot(x - a.cx, y - a.cy);
    const double theta = std::atan2(y - a.cy, x - a.cx);
    if (rho == 0.0 || !in_window(a, theta)) return std::abs(a.r - rho);
    double d = 1e300;
    for (const auto& [c, hw] : a.excluded)
        for (double e : {c - hw, c + hw})
            d = std::min(d, std::hypot(x - (a.cx + a.r * std::cos(e)), y - (a.cy + a.r * std::sin(e))));
    return d;
}

double room_center(int k) {
    double c = 0.5;
    for (int j = 1; j < k; ++j) c += 2.0 * std::ldexp(1.0, -j) + std::ldexp(1.0, -j - 1);
    return c;
}
double room_radius(int k) { return std::ldexp(1.0, -k); }
double passage_width(int k) { return std::ldexp(1.0, -4 * k); }

std::pair<double, double> squares_interval(int k) {
    if (k < 1) throw std::invalid_argument("squares interval index starts at 1");
    if (k == 1) return {0.5, 1.0};
    return {std::ldexp(1.0, -k), std::ldexp(1.0, -k + 1) - std::ldexp(1.0, -2 * k)};
}

Point squares_gap_point(int k) {
    if (k < 2) throw std::invalid_argument("squares gap index starts at 2");
    const double right = std::ldexp(1.0, -k + 1);
    const double left = squares_interval(k).second;
    return {0.5 * (left + right), 0.0};
}

double squares_gap_radius(int k) { return std::ldexp(1.0, -k) - std::ldexp(1.0, -2 * k); }

std::vector<Point> Domain::boundary_samples(int per_piece) const {
    std::vector<Point> pts;
    auto push = [&pts](double x, double y) {
        for (const auto& q : pts)
            if (q[0] == x && q[1] == y) return;
        pts.push_back({x, y});
    };
    for (const auto& s : segments()) {
        push(s.ax, s.ay);
        push(0.5 * (s.ax + s.bx), 0.5 * (s.ay + s.by));
        for (int j = 0; j < per_piece; ++j) {
            const double t = (j + 0.5) / per_piece;
            push(s.ax + t * (s.bx - s.ax), s.ay + t * (s.by - s.ay));
        }
    }
    for (const auto& a : arcs()) {
        for (const auto& [c, hw] : a.excluded)
            for (double e : {c - hw, c + hw}) push(a.cx + a.r * std::cos(e), a.cy + a.r * std::sin(e));
        const int n = std::max(per_piece, 4);
        for (int j = 0; j < n; ++j) {
            const double th = -kPi + 2.0 * kPi * j / n;
            if (!in_window(a, th)) push(a.cx + a.r * std::cos(th), a.cy + a.r * std::sin(th));
        }
    }
    for (const auto& p : isolated_boundary_points())
        if (p.size() == 2) push(p[0], p[1]);
    return pts;
}

nlohmann::json Domain::descriptor() const {
    return {{"tag", tag()}, {"params", params()}, {"k_max", k_max()}};
}

DomainPtr unit_cube(int N) { return std::make_shared<CubeDomain>(N); }
DomainPtr punctured_ball(int N) { return std::make_shared<PuncturedBallDomain>(N); }
DomainPtr rectangle(double a) { return std::make_shared<RectangleDomain>(a); }

DomainPtr rooms_and_passages(int k_max) { return std::make_shared<RoomsDomain>(k_max); }

DomainPtr squares_stack(int k_max) {
    if (k_max < 1) throw std::invalid_argument("squares_stack needs k_max >= 1");
    std::vector<std::pair<double, double>> v{{-1, -1}, {1, -1}, {1, 0.5}, {0.5, 0.5}, {0.5, 0}};
    std::vector<FeatureScale> features;
    for (int k = 2; k <= k_max; ++k) {
        const auto [l, r] = squares_interval(k);
        v.push_back({r, 0});
        v.push_back({r, r - l});
        v.push_back({l, r - l});
        v.push_back({l, 0});
        features.push_back({k, std::ldexp(1.0, -2 * k)});
    }
    v.push_back({-1, 0});
    auto part = [k_max](double x, double y) {
        if (y < 0.0) return 0;
        for (int k = 1; k <= k_max; ++k) {
            const auto [l, r] = squares_interval(k);
            if (x > l && x < r) return k;
        }
        return -1;
    };
    return std::make_shared<PolygonDomain>("squares_stack", std::move(v), k_max,
                                           nlohmann::json{{"base", "(-1,1)x(-1,0)"},
                                                          {"squares", "I_k x [0, |I_k|)"}},
                                           part, k_max + 1, std::move(features));
}

DomainPtr crocodile(int k_max) {
    if (k_max < 1) throw std::invalid_argument("crocodile needs k_max >= 1");
    auto p3 = [](int k) { return std::pow(3.0, -k); };
    std::vector<std::pair<double, double>> v{{-1, -1}, {1, -1}, {1, -0.5}};
    for (int k = 1; k <= k_max; ++k) {  // lower jaw b, right to left
        v.push_back({2 * p3(k), 0.0});
        v.push_back({p3(k), -0.5 * p3(k)});
    }
    v.push_back({0.0, 0.0});
    for (int k = k_max; k >= 1; --k) {  // upper jaw a, left to right
        v.push_back({p3(k), 0.0});
        v.push_back({2 * p3(k), p3(k)});
    }
    v.push_back({1, 0});
    v.push_back({1, 1});
    v.push_back({-1, 1});
    std::vector<FeatureScale> features;
    for (int k = 1; k <= k_max; ++k) features.push_back({k, 0.5 * p3(k)});
    return std::make_shared<PolygonDomain>(
        "crocodile", std::move(v), k_max,
        nlohmann::json{{"square", "(-1,1)^2"}, {"a", "a(3^-k)=0, a(2*3^-k)=3^-k, a(1)=0"},
                       {"b", "b(3^-k)=-3^-k/2, b(2*3^-k)=0, b(1)=-1/2"}},
        nullptr, 1, std::move(features));
}

DomainPtr skyscrapers(int k_max) {
    if (k_max < 1) throw std::invalid_argument("skyscrapers needs k_max >= 1");
    std::vector<std::pair<double, double>> v{{-1, -1}, {1, -1}, {1, 0}};
    std::vector<FeatureScale> features;
    for (int k = 1; k <= k_max; ++k) {
        const double a = std::ldexp(1.0, -k), w = std::ldexp(1.0, -k - 3);
        v.push_back({a + w, 0});
        v.push_back({a + w, 1});
        v.push_back({a, 1});
        v.push_back({a, 0});
        features.push_back({k, w});
    }
    v.push_back({-1, 0});
    auto part = [k_max](double x, double y) {
        if (y < 0.0) return 0;
        for (int k = 1; k <= k_max; ++k) {
            const double a = std::ldexp(1.0, -k), w = std::ldexp(1.0, -k - 3);
            if (x > a && x < a + w) return k;
        }
        return -1;
    };
    return std::make_shared<PolygonDomain>("skyscrapers", std::move(v), k_max,
                                           nlohmann::json{{"base", "(-1,1)x(-1,0)"},
                                                          {"towers", "(2^-k, 2^-k + 2^-(k+3)) x [0,1)"}},
                                           part, k_max + 1, std::move(features));
}

std::vector<std::string> gallery_tags() {
    return {"cube1", "cube2", "cube3", "punctured_ball2", "rooms_and_passages",
            "squares_stack", "crocodile", "skyscrapers", "rectangle"};
}

DomainPtr make_gallery_domain(const std::string& tag, int k_max) {
    auto suffix_int = [&tag](const std::string& prefix) -> int {
        if (tag.rfind(prefix, 0) != 0 || tag.size() == prefix.size()) return -1;
        const std::string rest = tag.substr(prefix.size());
        if (!std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; })) return -1;
        return std::stoi(rest);
    };
    if (int n = suffix_int("punctured_ball"); n > 0) return punctured_ball(n);
    if (int n = suffix_int("cube"); n > 0) return unit_cube(n);
    if (tag == "rooms_and_passages") return rooms_and_passages(k_max);
    if (tag == "squares_stack") return squares_stack(k_max);
    if (tag == "crocodile") return crocodile(k_max);
    if (tag == "skyscrapers") return skyscrapers(k_max);
    if (tag == "rectangle") return rectangle(0.5);
    throw std::invalid_argument("unknown gallery domain '" + tag + "'");
}

DomainPtr domain_from_descriptor(const nlohmann::json& d) {
    if (!d.is_object() || !d.contains("tag")) throw std::invalid_argument("domain descriptor needs a 'tag'");
    const std::string tag = d.at("tag").get<std::string>();
    const int k_max = d.value("k_max", kDefaultKMax);
    const auto params = d.value("params", nlohmann::json::object());
    if (tag == "rectangle") return rectangle(params.value("a", 0.5));
    if (tag == "cube" || tag == "punctured_ball") return make_gallery_domain(tag + std::to_string(params.value("N", 2)));
    return make_gallery_domain(tag, k_max);
}

double distance(const Domain& dom, std::span<const double> x) {
    if (static_cast<int>(x.size()) != dom.dim()) throw std::invalid_argument("distance: point has wrong dimension");
    if (!dom.inside(x)) throw std::invalid_argument("distance: point lies outside the domain");
    return dom.exact_distance(x);
}

}  // namespace sobtrace
