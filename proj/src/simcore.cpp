#include "physvid/simcore.hpp"

#include <algorithm>
#include <cmath>

namespace physvid::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Soft-body material range for the linear stiffness map.
constexpr double kSpringMin = 25.0;
constexpr double kSpringMax = 9000.0;
constexpr int kSoftNodes = 16;
constexpr int kProjectionIters = 10;

// Below this normal speed a floor contact is treated as resting, not a bounce.
constexpr double kBounceThreshold = 0.16;
constexpr double kRestEps = 1e-7;

bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

double body_bottom(const BodyState& b) {
    switch (b.kind) {
        case BodyKind::RigidDisc: return b.pos.y - b.radius;
        case BodyKind::RigidBox: return b.pos.y - b.half_extents.y;
        case BodyKind::SoftDisc: {
            double lo = b.boundary_nodes.empty() ? b.pos.y : b.boundary_nodes[0].pos.y;
            for (const auto& n : b.boundary_nodes) lo = std::min(lo, n.pos.y);
            return lo;
        }
    }
    return 0.0;
}

struct Extent {
    double lo, hi;
};

Extent body_x_extent(const BodyState& b) {
    if (b.kind == BodyKind::RigidBox)
        return {b.pos.x - b.half_extents.x, b.pos.x + b.half_extents.x};
    return {b.pos.x - b.radius, b.pos.x + b.radius};
}

// Coulomb friction on the tangential (horizontal) velocity given a normal
// impulse magnitude, or a resting normal force integrated over dt.
void friction_decelerate(double& vx, double max_delta) {
    double d = std::min(std::abs(vx), max_delta);
    vx -= (vx > 0 ? d : -d);
}

}  // namespace

void PhysicalProperties::validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(friction)) throw std::invalid_argument("friction outside [0,1]");
    if (!in01(restitution)) throw std::invalid_argument("restitution outside [0,1]");
    if (!in01(deform_mu)) throw std::invalid_argument("deform_mu outside [0,1]");
    if (!in01(deform_lambda)) throw std::invalid_argument("deform_lambda outside [0,1]");
    if (!in01(deform_gamma)) throw std::invalid_argument("deform_gamma outside [0,1]");
    if (!in01(force_magnitude)) throw std::invalid_argument("force_magnitude outside [0,1]");
    if (!(force_angle >= 0.0 && force_angle < kTwoPi))
        throw std::invalid_argument("force_angle outside [0, 2*pi)");
}

double PhysicalProperties::spring_stiffness() const {
    double s = 0.5 * (deform_mu + deform_lambda);
    return kSpringMin + (kSpringMax - kSpringMin) * s;
}

double PhysicalProperties::damping_ratio() const {
    // Floor keeps frame-level energy non-increasing even at deform_gamma = 0.
    return 0.15 + 0.85 * deform_gamma;
}

Vec2 BodyState::centroid() const {
    if (!is_soft() || boundary_nodes.empty()) return pos;
    Vec2 c{0, 0};
    for (const auto& n : boundary_nodes) c += n.pos;
    return c * (1.0 / double(boundary_nodes.size()));
}

double BodyState::vertical_extent() const {
    if (!is_soft() || boundary_nodes.empty())
        return kind == BodyKind::RigidBox ? 2.0 * half_extents.y : 2.0 * radius;
    double lo = boundary_nodes[0].pos.y, hi = lo;
    for (const auto& n : boundary_nodes) {
        lo = std::min(lo, n.pos.y);
        hi = std::max(hi, n.pos.y);
    }
    return hi - lo;
}

double BodyState::horizontal_extent() const {
    if (!is_soft() || boundary_nodes.empty())
        return kind == BodyKind::RigidBox ? 2.0 * half_extents.x : 2.0 * radius;
    double lo = boundary_nodes[0].pos.x, hi = lo;
    for (const auto& n : boundary_nodes) {
        lo = std::min(lo, n.pos.x);
        hi = std::max(hi, n.pos.x);
    }
    return hi - lo;
}

const char* scenario_name(ScenarioId id) {
    switch (id) {
        case ScenarioId::SlideBlock: return "slide_block";
        case ScenarioId::WallRebound: return "wall_rebound";
        case ScenarioId::VerticalBounce: return "vertical_bounce";
        case ScenarioId::SoftDrop: return "soft_drop";
        case ScenarioId::ImpactDeformable: return "impact_deformable";
        case ScenarioId::MultiBall: return "multi_ball";
    }
    return "unknown";
}

ScenarioId scenario_from_name(const std::string& name) {
    for (int i = 0; i < kScenarioCount; ++i) {
        auto id = static_cast<ScenarioId>(i);
        if (name == scenario_name(id)) return id;
    }
    throw std::invalid_argument("unknown scenario: " + name);
}

ScenarioSpec ScenarioSpec::standard(ScenarioId id) {
    ScenarioSpec s;
    s.id = id;
    switch (id) {
        case ScenarioId::SlideBlock:
            s.active_attributes = {Attribute::Friction, Attribute::Force};
            break;
        case ScenarioId::WallRebound:
            s.active_attributes = {Attribute::Restitution, Attribute::Force};
            break;
        case ScenarioId::VerticalBounce:
            s.active_attributes = {Attribute::Restitution};
            break;
        case ScenarioId::SoftDrop:
            s.active_attributes = {Attribute::Deformation};
            break;
        case ScenarioId::ImpactDeformable:
            s.active_attributes = {Attribute::Deformation};
            break;
        case ScenarioId::MultiBall:
            s.active_attributes = {Attribute::Friction, Attribute::Restitution};
            break;
    }
    return s;
}

bool ScenarioSpec::active(Attribute a) const {
    return std::find(active_attributes.begin(), active_attributes.end(), a) !=
           active_attributes.end();
}

namespace {

BodyState make_soft_disc(Vec2 center, double radius) {
    BodyState b;
    b.kind = BodyKind::SoftDisc;
    b.pos = center;
    b.radius = radius;
    b.boundary_nodes.resize(kSoftNodes);
    for (int i = 0; i < kSoftNodes; ++i) {
        double a = kTwoPi * double(i) / kSoftNodes;
        b.boundary_nodes[i].pos = {center.x + radius * std::cos(a),
                                   center.y + radius * std::sin(a)};
        b.boundary_nodes[i].vel = {0, 0};
    }
    return b;
}

BodyState make_disc(Vec2 center, double radius) {
    BodyState b;
    b.kind = BodyKind::RigidDisc;
    b.pos = center;
    b.radius = radius;
    return b;
}

BodyState make_box(Vec2 center, Vec2 half) {
    BodyState b;
    b.kind = BodyKind::RigidBox;
    b.pos = center;
    b.half_extents = half;
    return b;
}

}  // namespace

SceneState make_initial_scene(const ScenarioSpec& spec, Rng& rng) {
    SceneState scene;
    switch (spec.id) {
        case ScenarioId::SlideBlock: {
            Vec2 half{rng.uniform(0.18, 0.26), rng.uniform(0.13, 0.19)};
            double x = rng.uniform(0.9, 1.5);
            scene.bodies.push_back(make_box({x, half.y}, half));
            break;
        }
        case ScenarioId::WallRebound: {
            double r = rng.uniform(0.15, 0.21);
            double x = rng.uniform(1.2, 1.8);
            double y = rng.uniform(1.1, 1.7);
            scene.bodies.push_back(make_disc({x, y}, r));
            break;
        }
        case ScenarioId::VerticalBounce: {
            double r = rng.uniform(0.14, 0.20);
            double x = rng.uniform(0.9, 2.1);
            double h = rng.uniform(1.4, 2.2);
            scene.bodies.push_back(make_disc({x, h}, r));
            break;
        }
        case ScenarioId::SoftDrop: {
            double r = rng.uniform(0.28, 0.36);
            double x = rng.uniform(1.0, 2.0);
            double h = rng.uniform(1.1, 1.7);
            scene.bodies.push_back(make_soft_disc({x, h}, r));
            break;
        }
        case ScenarioId::ImpactDeformable: {
            double r = rng.uniform(0.28, 0.34);
            double x = rng.uniform(1.7, 2.1);
            auto soft = make_soft_disc({x, r}, r);
            scene.bodies.push_back(soft);
            double ir = rng.uniform(0.12, 0.16);
            double ix = rng.uniform(0.45, 0.8);
            double iy = rng.uniform(0.5, 1.0);
            auto imp = make_disc({ix, iy}, ir);
            imp.vel = {rng.uniform(2.2, 3.0), rng.uniform(0.2, 0.8)};
            scene.bodies.push_back(imp);
            break;
        }
        case ScenarioId::MultiBall: {
            double r = rng.uniform(0.13, 0.17);
            double x0 = rng.uniform(0.4, 0.7);
            auto cue = make_disc({x0, r}, r);
            cue.vel = {rng.uniform(1.8, 2.6), 0};
            scene.bodies.push_back(cue);
            double x1 = rng.uniform(1.4, 1.7);
            scene.bodies.push_back(make_disc({x1, r}, r));
            double x2 = x1 + rng.uniform(0.5, 0.8);
            scene.bodies.push_back(make_disc({x2, r}, r));
            break;
        }
    }
    return scene;
}

void apply_force(SceneState& scene, const PhysicalProperties& props, int frame_index,
                 int target_body) {
    if (target_body < 0 || target_body >= int(scene.bodies.size()))
        throw std::invalid_argument("apply_force: no designated target body in scene");
    if (frame_index < 0 || frame_index >= kForceWindowFrames)
        throw std::invalid_argument("apply_force: frame outside the force window");
    if (props.force_magnitude == 0.0) return;
    double m = kForceScale * props.force_magnitude / double(kForceWindowFrames);
    Vec2 dv{m * std::cos(props.force_angle), m * std::sin(props.force_angle)};
    BodyState& b = scene.bodies[target_body];
    b.vel += dv;
    for (auto& n : b.boundary_nodes) n.vel += dv;
}

SceneState step_rigid(const SceneState& scene_in, const PhysicalProperties& props, double dt,
                      int frame_index, std::vector<ContactEvent>* events) {
    if (dt <= 0) throw std::invalid_argument("step_rigid: dt must be positive");
    SceneState scene = scene_in;
    const double mu = props.friction;
    const double e = props.restitution;

    for (auto& b : scene.bodies) {
        if (b.is_soft()) throw std::invalid_argument("step_rigid: soft body present");
        b.vel.y -= kGravity * dt;
        // Resting floor contact: support the body and apply Coulomb friction.
        if (body_bottom(b) <= kRestEps && b.vel.y <= 0 && -b.vel.y <= kBounceThreshold) {
            b.vel.y = 0;
            friction_decelerate(b.vel.x, mu * kGravity * dt);
        }
    }
    for (auto& b : scene.bodies) b.pos += b.vel * dt;

    // Contact resolution in ascending body-index order.
    for (size_t i = 0; i < scene.bodies.size(); ++i) {
        BodyState& b = scene.bodies[i];
        double bottom = body_bottom(b);
        if (bottom < 0) {
            b.pos.y -= bottom;
            if (b.vel.y < 0) {
                double v_in = -b.vel.y;
                if (v_in > kBounceThreshold) {
                    b.vel.y = e * v_in;
                    friction_decelerate(b.vel.x, mu * (1.0 + e) * v_in);
                    if (events) events->push_back({frame_index, int(i), v_in, b.vel.y});
                } else {
                    b.vel.y = 0;
                }
            }
        }
        auto ex = body_x_extent(b);
        if (ex.lo < 0) {
            b.pos.x -= ex.lo;
            if (b.vel.x < 0) {
                friction_decelerate(b.vel.y, mu * (1.0 + e) * -b.vel.x);
                b.vel.x = -e * b.vel.x;
            }
        }
        if (ex.hi > kWorldSize) {
            b.pos.x -= ex.hi - kWorldSize;
            if (b.vel.x > 0) {
                friction_decelerate(b.vel.y, mu * (1.0 + e) * b.vel.x);
                b.vel.x = -e * b.vel.x;
            }
        }
        double top = b.kind == BodyKind::RigidBox ? b.pos.y + b.half_extents.y
                                                  : b.pos.y + b.radius;
        if (top > kWorldSize) {
            b.pos.y -= top - kWorldSize;
            if (b.vel.y > 0) b.vel.y = -e * b.vel.y;
        }
    }

    // Disc-disc collisions, pairs in ascending order.
    for (size_t i = 0; i < scene.bodies.size(); ++i) {
        for (size_t j = i + 1; j < scene.bodies.size(); ++j) {
            BodyState& a = scene.bodies[i];
            BodyState& b = scene.bodies[j];
            if (a.kind != BodyKind::RigidDisc || b.kind != BodyKind::RigidDisc) continue;
            Vec2 d = b.pos - a.pos;
            double dist = d.norm();
            double overlap = a.radius + b.radius - dist;
            if (overlap <= 0 || dist <= 1e-12) continue;
            Vec2 n = d * (1.0 / dist);
            a.pos -= n * (overlap * 0.5);
            b.pos += n * (overlap * 0.5);
            Vec2 rel = b.vel - a.vel;
            double vn = rel.dot(n);
            if (vn < 0) {
                // Equal unit masses.
                double jn = -(1.0 + e) * vn * 0.5;
                a.vel -= n * jn;
                b.vel += n * jn;
                Vec2 t{-n.y, n.x};
                double vt = rel.dot(t);
                double jt = std::min(std::abs(vt) * 0.5, mu * jn);
                if (vt > 0) jt = -jt;
                a.vel -= t * jt;
                b.vel += t * jt;
            }
        }
    }

    for (size_t i = 0; i < scene.bodies.size(); ++i) {
        const BodyState& b = scene.bodies[i];
        if (!finite(b.pos) || !finite(b.vel))
            throw SimulationError("non-finite rigid state at frame " +
                                  std::to_string(frame_index) + ", body " + std::to_string(i));
    }
    return scene;
}

namespace {

// Particle view used by the soft-scene projection solver.
struct Particle {
    Vec2 pos;
    Vec2 prev;
    Vec2 vel;
    double inv_mass;
    double contact_radius;  // 0 for ring nodes, body radius for rigid discs
};

struct Spring {
    int a, b;
    double rest;
    double lambda;  // XPBD accumulated multiplier, reset per substep
};

void project_distance(Particle& pa, Particle& pb, Spring& s, double alpha_tilde) {
    Vec2 d = pb.pos - pa.pos;
    double len = d.norm();
    if (len < 1e-12) return;
    Vec2 n = d * (1.0 / len);
    double c = len - s.rest;
    double wsum = pa.inv_mass + pb.inv_mass;
    double dl = (-c - alpha_tilde * s.lambda) / (wsum + alpha_tilde);
    s.lambda += dl;
    pa.pos -= n * (dl * pa.inv_mass);
    pb.pos += n * (dl * pb.inv_mass);
}

void project_floor(Particle& p, double mu) {
    double pen = p.contact_radius - p.pos.y;
    if (pen <= 0) return;
    p.pos.y += pen;
    // Position-level Coulomb friction: tangential slip limited by mu * normal push.
    double slip = p.pos.x - p.prev.x;
    double max_slip = mu * pen;
    if (std::abs(slip) > max_slip)
        p.pos.x -= (slip > 0 ? slip - max_slip : slip + max_slip);
}

void project_walls(Particle& p) {
    p.pos.x = std::clamp(p.pos.x, p.contact_radius, kWorldSize - p.contact_radius);
    p.pos.y = std::min(p.pos.y, kWorldSize - p.contact_radius);
}

}  // namespace

SceneState step_soft(const SceneState& scene_in, const PhysicalProperties& props, double dt) {
    if (dt <= 0) throw std::invalid_argument("step_soft: dt must be positive");
    bool any_soft = false;
    for (const auto& b : scene_in.bodies) any_soft |= b.is_soft();
    if (!any_soft) throw std::invalid_argument("step_soft: no soft body present");

    SceneState scene = scene_in;
    const double mu = props.friction;
    const double k = props.spring_stiffness();
    const double alpha_tilde = 1.0 / (k * dt * dt);

    // Flatten: soft bodies contribute ring nodes + a center particle; rigid
    // discs join as single heavy particles so node contacts stay symmetric.
    std::vector<Particle> parts;
    std::vector<Spring> springs;
    struct SoftRef {
        int body;
        int first_node;
        int center;
    };
    std::vector<SoftRef> softs;
    std::vector<int> rigid_part(scene.bodies.size(), -1);

    for (size_t bi = 0; bi < scene.bodies.size(); ++bi) {
        BodyState& b = scene.bodies[bi];
        if (b.is_soft()) {
            int m = int(b.boundary_nodes.size());
            double node_mass = 1.0 / double(m + 1);
            int first = int(parts.size());
            for (auto& n : b.boundary_nodes)
                parts.push_back({n.pos, n.pos, n.vel, 1.0 / node_mass, 0.0});
            int center = int(parts.size());
            parts.push_back({b.pos, b.pos, b.vel, 1.0 / node_mass, 0.0});
            softs.push_back({int(bi), first, center});
            double chord = 2.0 * b.radius * std::sin(kPi / m);
            for (int i = 0; i < m; ++i) {
                springs.push_back({first + i, first + (i + 1) % m, chord, 0.0});
                springs.push_back({first + i, center, b.radius, 0.0});
            }
        } else if (b.kind == BodyKind::RigidDisc) {
            rigid_part[bi] = int(parts.size());
            parts.push_back({b.pos, b.pos, b.vel, 1.0, b.radius});
        } else {
            throw std::invalid_argument("step_soft: boxes unsupported in soft scenes");
        }
    }

    for (auto& p : parts) {
        p.vel.y -= kGravity * dt;
        p.prev = p.pos;
        p.pos += p.vel * dt;
    }

    for (int it = 0; it < kProjectionIters; ++it) {
        for (auto& s : springs) project_distance(parts[s.a], parts[s.b], s, alpha_tilde);
        for (auto& p : parts) {
            project_floor(p, mu);
            project_walls(p);
        }
        // Ring nodes vs rigid discs: keep nodes outside the disc surface.
        for (size_t bi = 0; bi < scene.bodies.size(); ++bi) {
            if (rigid_part[bi] < 0) continue;
            Particle& disc = parts[rigid_part[bi]];
            for (const auto& sr : softs) {
                int m = sr.center - sr.first_node;
                for (int i = 0; i < m; ++i) {
                    Particle& node = parts[sr.first_node + i];
                    Vec2 d = node.pos - disc.pos;
                    double dist = d.norm();
                    double pen = disc.contact_radius - dist;
                    if (pen <= 0 || dist < 1e-12) continue;
                    Vec2 n = d * (1.0 / dist);
                    double wsum = node.inv_mass + disc.inv_mass;
                    node.pos += n * (pen * node.inv_mass / wsum);
                    disc.pos -= n * (pen * disc.inv_mass / wsum);
                }
            }
        }
    }

    for (auto& p : parts) p.vel = (p.pos - p.prev) * (1.0 / dt);

    // Spring damping: relative normal velocity decay, clamped for stability.
    const double zeta = props.damping_ratio();
    for (auto& s : springs) {
        Particle& pa = parts[s.a];
        Particle& pb = parts[s.b];
        Vec2 d = pb.pos - pa.pos;
        double len = d.norm();
        if (len < 1e-12) continue;
        Vec2 n = d * (1.0 / len);
        double vn = (pb.vel - pa.vel).dot(n);
        double wsum = pa.inv_mass + pb.inv_mass;
        double m_red = 1.0 / wsum;
        double c = zeta * 2.0 * std::sqrt(k * m_red);
        double f = std::min(c * dt * wsum, 1.0) * vn;
        pa.vel += n * (f * pa.inv_mass / wsum);
        pb.vel -= n * (f * pb.inv_mass / wsum);
    }

    // Write back.
    for (const auto& sr : softs) {
        BodyState& b = scene.bodies[sr.body];
        int m = sr.center - sr.first_node;
        for (int i = 0; i < m; ++i) {
            b.boundary_nodes[i].pos = parts[sr.first_node + i].pos;
            b.boundary_nodes[i].vel = parts[sr.first_node + i].vel;
        }
        b.pos = parts[sr.center].pos;
        b.vel = parts[sr.center].vel;
    }
    for (size_t bi = 0; bi < scene.bodies.size(); ++bi) {
        if (rigid_part[bi] < 0) continue;
        scene.bodies[bi].pos = parts[rigid_part[bi]].pos;
        scene.bodies[bi].vel = parts[rigid_part[bi]].vel;
    }

    for (const auto& p : parts) {
        if (!finite(p.pos) || !finite(p.vel))
            throw SimulationError("non-finite soft state");
        if (p.vel.norm() > 100.0)
            throw SimulationError(
                "soft-body instability: node speed exceeds 100 m/s; use a smaller dt");
    }
    return scene;
}

Trajectory simulate(const ScenarioSpec& spec, const PhysicalProperties& props, uint64_t seed,
                    int frames, double frame_dt) {
    props.validate();
    if (spec.active_attributes.empty())
        throw std::invalid_argument("simulate: scenario has no active attributes");
    if (frames < 2) throw std::invalid_argument("simulate: need at least 2 frames");

    // Inactive attributes pinned to neutral defaults.
    PhysicalProperties p = PhysicalProperties::neutral();
    if (spec.active(Attribute::Friction)) p.friction = props.friction;
    if (spec.active(Attribute::Restitution)) p.restitution = props.restitution;
    if (spec.active(Attribute::Deformation)) {
        p.deform_mu = props.deform_mu;
        p.deform_lambda = props.deform_lambda;
        p.deform_gamma = props.deform_gamma;
    }
    if (spec.active(Attribute::Force)) {
        p.force_magnitude = props.force_magnitude;
        p.force_angle = props.force_angle;
    }

    Rng layout = Rng(seed).fork("layout");
    Trajectory traj;
    traj.dt = frame_dt;
    traj.scenario_id = spec.id;
    traj.props = p;
    traj.seed = seed;
    traj.target_body = 0;
    traj.force_window = {0, spec.active(Attribute::Force) ? kForceWindowFrames : 0};

    SceneState scene = make_initial_scene(spec, layout);
    bool soft_scene = false;
    for (const auto& b : scene.bodies) soft_scene |= b.is_soft();

    traj.states.reserve(frames);
    traj.states.push_back(scene);
    double sub_dt = frame_dt / double(kSubstepsPerFrame);
    try {
        for (int f = 0; f + 1 < frames; ++f) {
            if (spec.active(Attribute::Force) && f < kForceWindowFrames)
                apply_force(scene, p, f, traj.target_body);
            for (int s = 0; s < kSubstepsPerFrame; ++s) {
                scene = soft_scene ? step_soft(scene, p, sub_dt)
                                   : step_rigid(scene, p, sub_dt, f, &traj.contacts);
            }
            traj.states.push_back(scene);
        }
    } catch (const SimulationError& err) {
        throw SimulationError(std::string(err.what()) + " [scenario " +
                              scenario_name(spec.id) + ", seed " + std::to_string(seed) + "]");
    }
    return traj;
}

double mechanical_energy(const SceneState& scene, const PhysicalProperties& props) {
    double e = 0.0;
    const double k = props.spring_stiffness();
    for (const auto& b : scene.bodies) {
        if (!b.is_soft()) {
            e += 0.5 * b.vel.dot(b.vel) + kGravity * b.pos.y;
            continue;
        }
        int m = int(b.boundary_nodes.size());
        double node_mass = 1.0 / double(m + 1);
        for (const auto& n : b.boundary_nodes)
            e += node_mass * (0.5 * n.vel.dot(n.vel) + kGravity * n.pos.y);
        e += node_mass * (0.5 * b.vel.dot(b.vel) + kGravity * b.pos.y);
        double chord = 2.0 * b.radius * std::sin(kPi / m);
        for (int i = 0; i < m; ++i) {
            double dn = (b.boundary_nodes[(i + 1) % m].pos - b.boundary_nodes[i].pos).norm();
            e += 0.5 * k * (dn - chord) * (dn - chord);
            double dr = (b.boundary_nodes[i].pos - b.pos).norm();
            e += 0.5 * k * (dr - b.radius) * (dr - b.radius);
        }
    }
    return e;
}

}  // namespace physvid::sim
