#pragma once

#include <array>
#include <vector>

#include "physvid/image.hpp"
#include "physvid/rng.hpp"
#include "physvid/simcore.hpp"

namespace physvid::render {

// Property-map channel layout: three semantic groups of three channels.
//   group 0 (surface): friction, restitution, presence pad
//   group 1 (deformation): deform_mu, deform_lambda, deform_gamma
//   group 2 (force): magnitude, cos(angle), sin(angle)
inline constexpr int kMapChannels = 9;
inline constexpr float kMapBackground = -1.0f;
// Affine-normalized attribute values in groups 1 and 2 are clamped here so a
// blob never equals the background value.
inline constexpr float kMapValueFloor = -0.9f;
inline constexpr double kBlobRadiusFactor = 0.12;

// Vertical world span mapped to the image; the floor line sits above the
// bottom edge so the support surface is visible.
inline constexpr double kViewYMin = -0.25;

struct Palette {
    std::array<float, 3> background;
    std::array<float, 3> floor;
    std::vector<std::array<float, 3>> bodies;

    static Palette sample(Rng& rng, int n_bodies);
};

// Shared affine world->pixel mapping (pixel centers at +0.5).
struct PixelMap {
    int height;
    int width;
    double scale() const { return width / sim::kWorldSize; }
    // x right, y up (world) to x right, y down (pixels).
    double px(double wx) const { return wx * scale(); }
    double py(double wy) const { return (kViewYMin + sim::kWorldSize - wy) * scale(); }
    double floor_row() const { return py(0.0); }
};

Image rasterize_frame(const sim::SceneState& scene, const Palette& palette, int resolution);

Video rasterize_video(const sim::Trajectory& traj, const Palette& palette, int resolution);

struct PropertyMap {
    int height = 0;
    int width = 0;
    std::vector<float> data;  // [kMapChannels][h][w]

    PropertyMap() = default;
    PropertyMap(int h, int w)
        : height(h), width(w), data(size_t(kMapChannels) * h * w, kMapBackground) {}
    float& at(int c, int y, int x) { return data[(size_t(c) * height + y) * width + x]; }
    float at(int c, int y, int x) const { return data[(size_t(c) * height + y) * width + x]; }
};

// Blobs are anchored at each body's frame-0 centroid; values are the sample's
// normalized attributes for the active groups, background elsewhere.
PropertyMap rasterize_property_map(const sim::SceneState& frame0,
                                   const sim::PhysicalProperties& props,
                                   const std::vector<sim::Attribute>& active_attributes,
                                   int resolution, int target_body = 0);

// Pixel centroid of a body at a given scene state, in pixel coordinates.
std::array<double, 2> body_pixel_centroid(const sim::BodyState& body, const PixelMap& map);

// Normalization used in the property map: [0,1] -> [-1,1], optionally floored.
float normalize_attribute(double raw, bool floored);

// Binary sector mask (1 inside the wedge). Angles measured in world
// orientation (y up), wedge centered on `angle` with total width `width`.
Image sector_mask(int height, int width, double angle, double sector_width,
                  std::array<double, 2> anchor_px);

// Alpha-blend a blue wedge onto every frame. Affine in the input pixels:
// out = (1 - alpha*mask)*in + alpha*mask*blue.
Video overlay_sector(const Video& video, double angle, double sector_width,
                     std::array<double, 2> anchor_px, double alpha);

inline constexpr std::array<float, 3> kSectorColor = {0.15f, 0.35f, 1.0f};

}  // namespace physvid::render
