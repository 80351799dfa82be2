#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "physvid/rng.hpp"

namespace physvid::sim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

// World extent in meters. Floor at y = 0, walls at x = 0 and x = kWorldSize,
// ceiling at y = kWorldSize. Square so the pixel mapping stays isotropic.
inline constexpr double kWorldSize = 3.0;
inline constexpr double kGravity = 9.8;

// Total velocity change c * F over the force window at F = 1.
inline constexpr double kForceScale = 3.0;
// Impulse is spread over the first kForceWindowFrames frames.
inline constexpr int kForceWindowFrames = 3;

inline constexpr int kSubstepsPerFrame = 16;
inline constexpr double kDefaultFrameDt = 1.0 / 12.0;

struct PhysicalProperties {
    double friction = 0.5;
    double restitution = 0.3;
    double deform_mu = 1.0;
    double deform_lambda = 1.0;
    double deform_gamma = 0.5;
    double force_magnitude = 0.0;
    double force_angle = 0.0;  // radians, canonical [0, 2*pi)

    // All scalars in [0,1], angle canonicalized; throws std::invalid_argument.
    void validate() const;
    static PhysicalProperties neutral() { return {}; }
    // Scalar used by deformation questions/eval: 1 = most deformable.
    double deformability() const { return 1.0 - 0.5 * (deform_mu + deform_lambda); }
    // Spring stiffness per the linear map over (deform_mu, deform_lambda).
    double spring_stiffness() const;
    // Damping ratio (fraction of critical), strictly positive and monotone in deform_gamma.
    double damping_ratio() const;
};

enum class BodyKind { RigidDisc, RigidBox, SoftDisc };

struct SoftNode {
    Vec2 pos;
    Vec2 vel;
};

struct BodyState {
    BodyKind kind = BodyKind::RigidDisc;
    Vec2 pos;           // disc center / box center / soft-body center particle
    Vec2 vel;
    double radius = 0.1;       // discs and soft rest radius
    Vec2 half_extents;         // boxes
    std::vector<SoftNode> boundary_nodes;  // soft ring, fixed count >= 8

    bool is_soft() const { return kind == BodyKind::SoftDisc; }
    // Geometric center: node mean for soft bodies, pos otherwise.
    Vec2 centroid() const;
    // Vertical extent of the soft ring (diameter for discs/boxes analog).
    double vertical_extent() const;
    double horizontal_extent() const;
};

struct SceneState {
    std::vector<BodyState> bodies;
};

// Normal-speed pair recorded at each restitution impulse, for oracle checks.
struct ContactEvent {
    int frame = -1;
    int body = -1;
    double speed_in = 0.0;   // normal speed just before the impulse
    double speed_out = 0.0;  // normal speed just after
};

enum class ScenarioId {
    SlideBlock,
    WallRebound,
    VerticalBounce,
    SoftDrop,
    ImpactDeformable,
    MultiBall,
};

inline constexpr int kScenarioCount = 6;
const char* scenario_name(ScenarioId id);
ScenarioId scenario_from_name(const std::string& name);

enum class Attribute { Friction, Restitution, Deformation, Force };

struct ScenarioSpec {
    ScenarioId id = ScenarioId::SlideBlock;
    std::vector<Attribute> active_attributes;
    // Layout randomization ranges are baked into make_initial_scene.
    static ScenarioSpec standard(ScenarioId id);
    bool active(Attribute a) const;
};

struct Trajectory {
    std::vector<SceneState> states;  // length T
    double dt = kDefaultFrameDt;     // seconds per frame
    ScenarioId scenario_id = ScenarioId::SlideBlock;
    PhysicalProperties props;
    uint64_t seed = 0;
    int target_body = 0;  // body receiving the impulse / carrying force blobs
    std::array<int, 2> force_window = {0, kForceWindowFrames};  // [first, last)
    std::vector<ContactEvent> contacts;
};

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Initial scene for a scenario; consumes exactly one seeded stream.
SceneState make_initial_scene(const ScenarioSpec& spec, Rng& layout_rng);

// One rigid substep: semi-implicit Euler + impulse contacts. All bodies rigid.
SceneState step_rigid(const SceneState& scene, const PhysicalProperties& props, double dt,
                      int frame_index = -1, std::vector<ContactEvent>* events = nullptr);

// One soft-scene substep: compliant position projection over the spring ring;
// handles rigid bodies present in the same scene. Requires >= 1 soft body.
SceneState step_soft(const SceneState& scene, const PhysicalProperties& props, double dt);

// Adds one force-window increment c*F/W*(cos phi, sin phi) to the target body.
// frame_index must lie inside [0, kForceWindowFrames).
void apply_force(SceneState& scene, const PhysicalProperties& props, int frame_index,
                 int target_body);

// Deterministic rollout: frame 0 is the untouched initial scene.
Trajectory simulate(const ScenarioSpec& spec, const PhysicalProperties& props, uint64_t seed,
                    int frames, double frame_dt = kDefaultFrameDt);

// Kinetic + gravitational + elastic energy; used by the energy invariant test.
double mechanical_energy(const SceneState& scene, const PhysicalProperties& props);

}  // namespace physvid::sim
