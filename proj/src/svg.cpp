#include "sobtrace/svg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sobtrace/rearrangement.hpp"

namespace sobtrace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Canvas {
public:
    Canvas(const Box& box, const SvgOptions& opts) : opts_(opts) {
        x0_ = box.lo[0];
        x1_ = box.hi[0];
        y0_ = box.lo.size() > 1 ? box.lo[1] : -0.05 * (x1_ - x0_);
        y1_ = box.hi.size() > 1 ? box.hi[1] : 0.05 * (x1_ - x0_);
        const double inner = opts.width_px - 2.0 * opts.margin_px;
        scale_ = inner / (x1_ - x0_);
        height_ = static_cast<int>(std::ceil((y1_ - y0_) * scale_)) + 2 * opts.margin_px + 28;
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width_px << "\" height=\"" << height_
             << "\" viewBox=\"0 0 " << opts.width_px << ' ' << height_ << "\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    double X(double x) const { return opts_.margin_px + (x - x0_) * scale_; }
    double Y(double y) const { return opts_.margin_px + (y1_ - y) * scale_; }
    double scale() const { return scale_; }
    std::ostringstream& out() { return out_; }

    std::string finish(const std::string& caption) {
        out_ << "<text x=\"" << opts_.margin_px << "\" y=\"" << height_ - 10
             << "\" font-family=\"sans-serif\" font-size=\"13\">" << escape(caption) << "</text>\n";
        out_ << "</svg>\n";
        return out_.str();
    }

    static std::string escape(const std::string& s) {
        std::string r;
        for (char c : s) {
            if (c == '<') r += "&lt;";
            else if (c == '>') r += "&gt;";
            else if (c == '&') r += "&amp;";
            else r += c;
        }
        return r;
    }

private:
    SvgOptions opts_;
    double x0_, x1_, y0_, y1_, scale_;
    int height_;
    std::ostringstream out_;
};

double wrap(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0 ? a + kTwoPi : a;
}

// Angular intervals of the circle left after removing the excluded windows.
std::vector<std::pair<double, double>> arc_pieces(const Arc& arc) {
    if (arc.excluded.empty()) return {{0.0, kTwoPi}};
    std::vector<std::pair<double, double>> windows;
    for (const auto& [c, w] : arc.excluded) windows.push_back({wrap(c - w), wrap(c - w) + 2.0 * w});
    std::sort(windows.begin(), windows.end());
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const double start = windows[i].second;
        double end = i + 1 < windows.size() ? windows[i + 1].first : windows[0].first + kTwoPi;
        if (end > start) pieces.push_back({start, end});
    }
    return pieces;
}

}  // namespace

std::string default_caption(const Domain& dom) {
    const std::string tag = dom.tag();
    const std::string k = std::to_string(dom.k_max());
    if (tag == "rooms_and_passages")
        return "Rooms and passages: discs of radius 2^-k joined by passages of length 2^-k and width 2^-4k, k <= " + k;
    if (tag == "squares_stack")
        return "Squares stack: squares over I_k = (2^-k - 2^-2k, 2^-k) on a base, gaps of width 2^-2k, k <= " + k;
    if (tag == "crocodile")
        return "Crocodile: zig-zag jaws meeting at the origin with scales 3^-k, k <= " + k;
    if (tag == "skyscrapers")
        return "Skyscrapers: towers of width 2^-k-3 and height 1 on a base, k <= " + k;
    if (tag.rfind("punctured_ball", 0) == 0) return "Punctured unit ball (dimension " + std::to_string(dom.dim()) + ")";
    if (tag.rfind("cube", 0) == 0) return "Unit cube (dimension " + std::to_string(dom.dim()) + ")";
    if (tag == "rectangle") return "Rectangle (0,1) x (0,a), a = " + format_number(dom.params().value("a", 0.0));
    return tag;
}

std::string render_domain_svg(const Domain& dom, const SvgOptions& opts) {
    const Box box = dom.bbox();
    Canvas cv(box, opts);
    auto& o = cv.out();
    const auto segs = dom.segments();
    const auto arcs = dom.arcs();
    if (segs.empty() && arcs.empty()) {
        const double y0 = box.lo.size() > 1 ? box.lo[1] : 0.0, y1 = box.hi.size() > 1 ? box.hi[1] : 0.0;
        o << "<rect x=\"" << cv.X(box.lo[0]) << "\" y=\"" << cv.Y(y1) << "\" width=\""
          << (box.hi[0] - box.lo[0]) * cv.scale() << "\" height=\"" << std::max(1.0, (y1 - y0) * cv.scale())
          << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\""
          << (dom.dim() > 2 ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    }
    for (const auto& s : segs)
        o << "<line x1=\"" << cv.X(s.ax) << "\" y1=\"" << cv.Y(s.ay) << "\" x2=\"" << cv.X(s.bx) << "\" y2=\""
          << cv.Y(s.by) << "\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
    for (const auto& a : arcs) {
        const double rpx = a.r * cv.scale();
        for (const auto& [t0, t1] : arc_pieces(a)) {
            if (t1 - t0 >= kTwoPi - 1e-12) {
                o << "<circle cx=\"" << cv.X(a.cx) << "\" cy=\"" << cv.Y(a.cy) << "\" r=\"" << rpx
                  << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
                continue;
            }
            const int large = (t1 - t0) > std::numbers::pi ? 1 : 0;
            // Counter-clockwise in the domain is clockwise on screen (y flipped): sweep flag 0.
            o << "<path d=\"M " << cv.X(a.cx + a.r * std::cos(t0)) << ' ' << cv.Y(a.cy + a.r * std::sin(t0)) << " A "
              << rpx << ' ' << rpx << " 0 " << large << " 0 " << cv.X(a.cx + a.r * std::cos(t1)) << ' '
              << cv.Y(a.cy + a.r * std::sin(t1)) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
        }
    }
    for (const auto& p : dom.isolated_boundary_points())
        if (p.size() >= 2)
            o << "<circle cx=\"" << cv.X(p[0]) << "\" cy=\"" << cv.Y(p[1]) << "\" r=\"3\" fill=\"white\" stroke=\"black\"/>\n";
    return cv.finish(opts.caption.empty() ? default_caption(dom) : opts.caption);
}

std::string render_grid_svg(const GridDomain& gd, const GridSet* overlay, const SvgOptions& opts) {
    if (gd.dim != 2) throw std::invalid_argument("render_grid_svg: only 2-D grids are rendered");
    if (overlay && overlay->member().size() != gd.cell_count())
        throw std::invalid_argument("render_grid_svg: overlay belongs to another grid");
    Box box{{gd.origin[0], gd.origin[1]}, {gd.origin[0] + gd.n[0] * gd.h, gd.origin[1] + gd.n[1] * gd.h}};
    Canvas cv(box, opts);
    auto& o = cv.out();
    auto runs = [&](auto&& pred, const char* fill) {
        for (int j = 0; j < gd.n[1]; ++j) {
            int i = 0;
            while (i < gd.n[0]) {
                if (!pred(gd.index(i, j))) {
                    ++i;
                    continue;
                }
                int e = i;
                while (e < gd.n[0] && pred(gd.index(e, j))) ++e;
                const double x = gd.origin[0] + i * gd.h, y = gd.origin[1] + (j + 1) * gd.h;
                o << "<rect x=\"" << cv.X(x) << "\" y=\"" << cv.Y(y) << "\" width=\"" << (e - i) * gd.h * cv.scale()
                  << "\" height=\"" << gd.h * cv.scale() << "\" fill=\"" << fill << "\"/>\n";
                i = e;
            }
        }
    };
    runs([&](std::size_t c) { return gd.inside[c] != 0; }, "#c8d4e3");
    if (overlay) runs([&](std::size_t c) { return overlay->contains(c); }, "#d9534f");
    std::string caption = opts.caption.empty() ? default_caption(*gd.domain) : opts.caption;
    if (opts.caption.empty()) caption += ", grid h = " + format_number(gd.h);
    return cv.finish(caption);
}

}  // namespace sobtrace
