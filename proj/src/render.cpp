#include "physvid/render.hpp"

#include <algorithm>
#include <cmath>

namespace physvid::render {

namespace {

constexpr double kTwoPi = 6.283185307179586;

float clampf(float v, float lo, float hi) { return std::min(hi, std::max(lo, v)); }

// Relative luminance, for palette contrast checks.
double luma(const std::array<float, 3>& c) {
    return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
}

std::array<float, 3> random_color(Rng& rng) {
    return {float(rng.uniform()), float(rng.uniform()), float(rng.uniform())};
}

// Coverage of the pixel at (px, py) by a disc, from the signed distance of
// the pixel center to the edge (1 px wide anti-aliased rim).
double disc_coverage(double px, double py, double cx, double cy, double r) {
    double d = std::hypot(px - cx, py - cy) - r;
    return std::clamp(0.5 - d, 0.0, 1.0);
}

double box_coverage(double px, double py, double cx, double cy, double hx, double hy) {
    double dx = std::abs(px - cx) - hx;
    double dy = std::abs(py - cy) - hy;
    double d = std::max(dx, dy);
    return std::clamp(0.5 - d, 0.0, 1.0);
}

// Signed distance of a point to a polygon boundary (negative inside).
double polygon_sdf(double px, double py, const std::vector<std::array<double, 2>>& poly) {
    double d2 = 1e30;
    bool inside = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        double xi = poly[i][0], yi = poly[i][1];
        double xj = poly[j][0], yj = poly[j][1];
        double ex = xj - xi, ey = yj - yi;
        double wx = px - xi, wy = py - yi;
        double t = std::clamp((wx * ex + wy * ey) / (ex * ex + ey * ey + 1e-30), 0.0, 1.0);
        double rx = wx - t * ex, ry = wy - t * ey;
        d2 = std::min(d2, rx * rx + ry * ry);
        if ((yi > py) != (yj > py) && px < xi + (py - yi) * ex / (ey + (ey == 0 ? 1e-30 : 0)))
            inside = !inside;
    }
    double d = std::sqrt(d2);
    return inside ? -d : d;
}

void blend_pixel(Image& im, int y, int x, const std::array<float, 3>& color, double cov) {
    if (cov <= 0) return;
    for (int c = 0; c < 3; ++c) {
        float& px = im.at(c, y, x);
        px = float((1.0 - cov) * px + cov * color[c]);
    }
}

}  // namespace

Palette Palette::sample(Rng& rng, int n_bodies) {
    Palette p;
    p.background = random_color(rng);
    p.floor = random_color(rng);
    p.bodies.resize(n_bodies);
    for (int i = 0; i < n_bodies; ++i) {
        // Keep bodies separable from the scene background and floor.
        for (int tries = 0; tries < 64; ++tries) {
            p.bodies[i] = random_color(rng);
            double lb = luma(p.bodies[i]);
            if (std::abs(lb - luma(p.background)) >= 0.25 &&
                std::abs(lb - luma(p.floor)) >= 0.2)
                break;
        }
    }
    return p;
}

Image rasterize_frame(const sim::SceneState& scene, const Palette& palette, int resolution) {
    PixelMap map{resolution, resolution};
    Image im(3, resolution, resolution);
    double floor_row = map.floor_row();
    for (int y = 0; y < resolution; ++y) {
        double cov = std::clamp(double(y) + 0.5 - floor_row + 0.5, 0.0, 1.0);
        for (int x = 0; x < resolution; ++x)
            for (int c = 0; c < 3; ++c)
                im.at(c, y, x) =
                    float((1.0 - cov) * palette.background[c] + cov * palette.floor[c]);
    }

    const double s = map.scale();
    for (size_t bi = 0; bi < scene.bodies.size(); ++bi) {
        const auto& b = scene.bodies[bi];
        const auto& color =
            palette.bodies.empty() ? palette.floor : palette.bodies[bi % palette.bodies.size()];
        if (b.kind == sim::BodyKind::RigidDisc) {
            double cx = map.px(b.pos.x), cy = map.py(b.pos.y), r = b.radius * s;
            int y0 = std::max(0, int(cy - r - 1.5)), y1 = std::min(resolution - 1, int(cy + r + 1.5));
            int x0 = std::max(0, int(cx - r - 1.5)), x1 = std::min(resolution - 1, int(cx + r + 1.5));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    blend_pixel(im, y, x, color, disc_coverage(x + 0.5, y + 0.5, cx, cy, r));
        } else if (b.kind == sim::BodyKind::RigidBox) {
            double cx = map.px(b.pos.x), cy = map.py(b.pos.y);
            double hx = b.half_extents.x * s, hy = b.half_extents.y * s;
            int y0 = std::max(0, int(cy - hy - 1.5)), y1 = std::min(resolution - 1, int(cy + hy + 1.5));
            int x0 = std::max(0, int(cx - hx - 1.5)), x1 = std::min(resolution - 1, int(cx + hx + 1.5));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    blend_pixel(im, y, x, color, box_coverage(x + 0.5, y + 0.5, cx, cy, hx, hy));
        } else {
            std::vector<std::array<double, 2>> poly;
            poly.reserve(b.boundary_nodes.size());
            double minx = 1e30, maxx = -1e30, miny = 1e30, maxy = -1e30;
            for (const auto& n : b.boundary_nodes) {
                double px = map.px(n.pos.x), py = map.py(n.pos.y);
                poly.push_back({px, py});
                minx = std::min(minx, px); maxx = std::max(maxx, px);
                miny = std::min(miny, py); maxy = std::max(maxy, py);
            }
            int y0 = std::max(0, int(miny - 1.5)), y1 = std::min(resolution - 1, int(maxy + 1.5));
            int x0 = std::max(0, int(minx - 1.5)), x1 = std::min(resolution - 1, int(maxx + 1.5));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    double d = polygon_sdf(x + 0.5, y + 0.5, poly);
                    blend_pixel(im, y, x, color, std::clamp(0.5 - d, 0.0, 1.0));
                }
        }
    }
    for (auto& v : im.data) v = clampf(v, 0.f, 1.f);
    return im;
}

Video rasterize_video(const sim::Trajectory& traj, const Palette& palette, int resolution) {
    Video v(int(traj.states.size()), 3, resolution, resolution);
    for (size_t t = 0; t < traj.states.size(); ++t)
        v.set_frame(int(t), rasterize_frame(traj.states[t], palette, resolution));
    return v;
}

std::array<double, 2> body_pixel_centroid(const sim::BodyState& body, const PixelMap& map) {
    sim::Vec2 c = body.centroid();
    return {map.px(c.x), map.py(c.y)};
}

float normalize_attribute(double raw, bool floored) {
    float v = float(2.0 * raw - 1.0);
    return floored ? std::max(v, kMapValueFloor) : v;
}

PropertyMap rasterize_property_map(const sim::SceneState& frame0,
                                   const sim::PhysicalProperties& props,
                                   const std::vector<sim::Attribute>& active_attributes,
                                   int resolution, int target_body) {
    auto active = [&](sim::Attribute a) {
        return std::find(active_attributes.begin(), active_attributes.end(), a) !=
               active_attributes.end();
    };
    bool surface_on = active(sim::Attribute::Friction) || active(sim::Attribute::Restitution);
    bool deform_on = active(sim::Attribute::Deformation);
    bool force_on = active(sim::Attribute::Force);
    if (force_on && (target_body < 0 || target_body >= int(frame0.bodies.size())))
        throw std::invalid_argument("rasterize_property_map: target body missing");

    PixelMap map{resolution, resolution};
    PropertyMap pm(resolution, resolution);
    double r_blob = kBlobRadiusFactor * resolution;

    // Later bodies overwrite earlier ones where blobs overlap.
    for (size_t bi = 0; bi < frame0.bodies.size(); ++bi) {
        const auto& b = frame0.bodies[bi];
        auto [cx, cy] = body_pixel_centroid(b, map);
        int y0 = std::max(0, int(cy - r_blob - 1)), y1 = std::min(resolution - 1, int(cy + r_blob + 1));
        int x0 = std::max(0, int(cx - r_blob - 1)), x1 = std::min(resolution - 1, int(cx + r_blob + 1));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double d = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
                if (d > r_blob) continue;
                if (surface_on) {
                    pm.at(0, y, x) = normalize_attribute(props.friction, false);
                    pm.at(1, y, x) = normalize_attribute(props.restitution, false);
                    pm.at(2, y, x) = 1.0f;
                }
                if (deform_on && b.is_soft()) {
                    pm.at(3, y, x) = normalize_attribute(props.deform_mu, true);
                    pm.at(4, y, x) = normalize_attribute(props.deform_lambda, true);
                    pm.at(5, y, x) = normalize_attribute(props.deform_gamma, true);
                }
                if (force_on && int(bi) == target_body) {
                    pm.at(6, y, x) = normalize_attribute(props.force_magnitude, true);
                    pm.at(7, y, x) = float(std::cos(props.force_angle));
                    pm.at(8, y, x) = float(std::sin(props.force_angle));
                }
            }
    }
    return pm;
}

Image sector_mask(int height, int width, double angle, double sector_width,
                  std::array<double, 2> anchor_px) {
    if (!(sector_width > 0.0 && sector_width <= 3.14159265358979323846 + 1e-12))
        throw std::invalid_argument("sector_mask: width must lie in (0, pi]");
    Image m(1, height, width, 0.f);
    double half = sector_width / 2.0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double dx = x + 0.5 - anchor_px[0];
            double dy = anchor_px[1] - (y + 0.5);  // world orientation, y up
            double a = std::atan2(dy, dx);
            double diff = std::remainder(a - angle, kTwoPi);
            if (std::abs(diff) <= half || (dx == 0.0 && dy == 0.0)) m.at(0, y, x) = 1.f;
        }
    return m;
}

Video overlay_sector(const Video& video, double angle, double sector_width,
                     std::array<double, 2> anchor_px, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("overlay_sector: alpha outside [0,1]");
    Image mask = sector_mask(video.height, video.width, angle, sector_width, anchor_px);
    Video out = video;
    if (alpha == 0.0) return out;
    for (int t = 0; t < out.frames; ++t)
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < out.height; ++y)
                for (int x = 0; x < out.width; ++x) {
                    float m = mask.at(0, y, x);
                    if (m <= 0) continue;
                    float& v = out.at(t, c, y, x);
                    v = float((1.0 - alpha * m) * v + alpha * m * kSectorColor[c]);
                }
    return out;
}

}  // namespace physvid::render
