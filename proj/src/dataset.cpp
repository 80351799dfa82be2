#include "physvid/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "physvid/hash.hpp"

namespace physvid::data {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

std::string format_val(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void write_f32(const fs::path& file, const std::vector<float>& values) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + file.string());
    out.write(reinterpret_cast<const char*>(values.data()),
              std::streamsize(values.size() * sizeof(float)));
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::vector<float> read_f32(const fs::path& file, size_t expect_count) {
    std::ifstream in(file, std::ios::binary | std::ios::ate);
    if (!in) throw LoadError("cannot open: " + file.string());
    auto bytes = size_t(in.tellg());
    if (bytes != expect_count * sizeof(float))
        throw ShapeError("shape mismatch in " + file.string() + ": expected " +
                         std::to_string(expect_count * sizeof(float)) + " bytes, found " +
                         std::to_string(bytes));
    in.seekg(0);
    std::vector<float> values(expect_count);
    in.read(reinterpret_cast<char*>(values.data()), std::streamsize(bytes));
    if (!in) throw LoadError("read failed: " + file.string());
    return values;
}

std::string checksum_hex(const std::vector<float>& values) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  (unsigned long long)fnv1a64(values.data(), values.size() * sizeof(float)));
    return buf;
}

json props_to_json(const sim::PhysicalProperties& p) {
    return json{{"friction", p.friction},
                {"restitution", p.restitution},
                {"deform_mu", p.deform_mu},
                {"deform_lambda", p.deform_lambda},
                {"deform_gamma", p.deform_gamma},
                {"force_magnitude", p.force_magnitude},
                {"force_angle", p.force_angle}};
}

sim::PhysicalProperties props_from_json(const json& j) {
    sim::PhysicalProperties p;
    p.friction = j.at("friction");
    p.restitution = j.at("restitution");
    p.deform_mu = j.at("deform_mu");
    p.deform_lambda = j.at("deform_lambda");
    p.deform_gamma = j.at("deform_gamma");
    p.force_magnitude = j.at("force_magnitude");
    p.force_angle = j.at("force_angle");
    return p;
}

const char* attribute_name(sim::Attribute a) {
    switch (a) {
        case sim::Attribute::Friction: return "friction";
        case sim::Attribute::Restitution: return "restitution";
        case sim::Attribute::Deformation: return "deformation";
        case sim::Attribute::Force: return "force";
    }
    return "?";
}

sim::Attribute attribute_from_name(const std::string& s) {
    if (s == "friction") return sim::Attribute::Friction;
    if (s == "restitution") return sim::Attribute::Restitution;
    if (s == "deformation") return sim::Attribute::Deformation;
    if (s == "force") return sim::Attribute::Force;
    throw LoadError("unknown attribute: " + s);
}

std::string scene_text(const sim::ScenarioSpec& spec) {
    switch (spec.id) {
        case sim::ScenarioId::SlideBlock:
            return "A block is pushed and slides across a flat floor.";
        case sim::ScenarioId::WallRebound:
            return "A ball is launched through the air and rebounds off the walls.";
        case sim::ScenarioId::VerticalBounce:
            return "A ball drops vertically and bounces on the floor.";
        case sim::ScenarioId::SoftDrop:
            return "A soft ball drops onto the floor and deforms on impact.";
        case sim::ScenarioId::ImpactDeformable:
            return "A rigid ball strikes a soft body resting on the floor.";
        case sim::ScenarioId::MultiBall:
            return "Several balls collide while rolling along a flat surface.";
    }
    return "";
}

}  // namespace

const char* question_kind_name(QuestionKind k) {
    switch (k) {
        case QuestionKind::RangeYesNo: return "range_yesno";
        case QuestionKind::Sector: return "sector";
        case QuestionKind::Magnitude: return "magnitude";
    }
    return "?";
}

QuestionKind question_kind_from_name(const std::string& s) {
    if (s == "range_yesno") return QuestionKind::RangeYesNo;
    if (s == "sector") return QuestionKind::Sector;
    if (s == "magnitude") return QuestionKind::Magnitude;
    throw LoadError("unknown question kind: " + s);
}

const char* qattr_name(QAttr a) {
    switch (a) {
        case QAttr::Friction: return "friction";
        case QAttr::Restitution: return "restitution";
        case QAttr::Deformation: return "deformation";
        case QAttr::ForceMagnitude: return "force_magnitude";
        case QAttr::ForceDirection: return "force_direction";
    }
    return "?";
}

QAttr qattr_from_name(const std::string& s) {
    if (s == "friction") return QAttr::Friction;
    if (s == "restitution") return QAttr::Restitution;
    if (s == "deformation") return QAttr::Deformation;
    if (s == "force_magnitude") return QAttr::ForceMagnitude;
    if (s == "force_direction") return QAttr::ForceDirection;
    throw LoadError("unknown question attribute: " + s);
}

double attribute_scalar(const sim::PhysicalProperties& props, QAttr attr) {
    switch (attr) {
        case QAttr::Friction: return props.friction;
        case QAttr::Restitution: return props.restitution;
        case QAttr::Deformation: return props.deformability();
        case QAttr::ForceMagnitude: return props.force_magnitude;
        case QAttr::ForceDirection: return props.force_angle;
    }
    return 0.0;
}

bool evaluate_yesno(const Question& q, const sim::PhysicalProperties& props) {
    if (q.kind == QuestionKind::RangeYesNo) {
        double v = attribute_scalar(props, q.attribute);
        return v >= q.min_val && v <= q.max_val;
    }
    if (q.kind == QuestionKind::Sector) {
        double diff = std::remainder(props.force_angle - q.sector_angle, kTwoPi);
        return std::abs(diff) <= q.sector_width / 2.0;
    }
    throw std::invalid_argument("evaluate_yesno: magnitude question has no yes/no answer");
}

VideoSample build_sample(const sim::ScenarioSpec& spec, const sim::PhysicalProperties& props,
                         uint64_t seed, int frames, int resolution, double fps) {
    sim::Trajectory traj = sim::simulate(spec, props, seed, frames, 1.0 / fps);
    Rng palette_rng = Rng(seed).fork("palette");
    auto palette = render::Palette::sample(palette_rng, int(traj.states[0].bodies.size()));

    VideoSample s;
    s.frames = render::rasterize_video(traj, palette, resolution);
    s.property_map = render::rasterize_property_map(traj.states[0], traj.props,
                                                    spec.active_attributes, resolution,
                                                    traj.target_body);
    s.props = traj.props;
    s.scenario_id = spec.id;
    s.active_attributes = spec.active_attributes;
    s.seed = seed;
    s.text = scene_text(spec);
    s.force_window = traj.force_window;
    s.fps = fps;
    render::PixelMap map{resolution, resolution};
    s.target_px = render::body_pixel_centroid(traj.states[0].bodies[traj.target_body], map);
    return s;
}

sim::PhysicalProperties sample_properties(const sim::ScenarioSpec& spec, Rng& rng) {
    sim::PhysicalProperties p = sim::PhysicalProperties::neutral();
    if (spec.active(sim::Attribute::Friction)) p.friction = rng.uniform();
    if (spec.active(sim::Attribute::Restitution)) p.restitution = rng.uniform();
    if (spec.active(sim::Attribute::Deformation)) {
        p.deform_mu = rng.uniform();
        p.deform_lambda = rng.uniform();
        p.deform_gamma = rng.uniform();
    }
    if (spec.active(sim::Attribute::Force)) {
        p.force_magnitude = rng.uniform();
        p.force_angle = rng.uniform(0.0, kTwoPi);
    }
    return p;
}

namespace {

Question make_range_question(const VideoSample& sample, QAttr attr, bool want_yes, Rng& rng) {
    double v = attribute_scalar(sample.props, attr);
    Question q;
    q.sample_id = sample.id;
    q.kind = QuestionKind::RangeYesNo;
    q.attribute = attr;
    q.answer_yes = want_yes;
    const double w = kRangeWindowWidth;
    if (want_yes) {
        double lo_min = std::max(0.0, v - w);
        double lo_max = std::min(v, 1.0 - w);
        q.min_val = rng.uniform(lo_min, lo_max);
        q.max_val = q.min_val + w;
    } else {
        // Margin keeps near-boundary values unambiguous; widen (shrink the
        // margin) if the draw keeps failing.
        double margin = 0.05;
        int attempts = 0;
        for (;;) {
            double lo = rng.uniform(0.0, 1.0 - w);
            if (v < lo - margin || v > lo + w + margin) {
                q.min_val = lo;
                q.max_val = lo + w;
                break;
            }
            if (++attempts % 25 == 0) margin *= 0.5;
        }
    }
    const char* noun = nullptr;
    switch (attr) {
        case QAttr::Friction:
            noun = "the friction between the object and the surface";
            break;
        case QAttr::Restitution: noun = "the bounciness of the object"; break;
        case QAttr::Deformation: noun = "the deformability of the object"; break;
        case QAttr::ForceMagnitude: noun = "the force applied to the object"; break;
        case QAttr::ForceDirection: noun = "?"; break;
    }
    q.prompt_text = std::string("Watch the object's motion. Is ") + noun + " between " +
                    format_val(q.min_val) + " and " + format_val(q.max_val) +
                    "? Answer yes or no.";
    return q;
}

Question make_sector_question(const VideoSample& sample, bool want_yes, Rng& rng) {
    (void)rng;
    Question q;
    q.sample_id = sample.id;
    q.kind = QuestionKind::Sector;
    q.attribute = QAttr::ForceDirection;
    q.sector_width = kSectorWidthDefault;
    double center = want_yes ? sample.props.force_angle : sample.props.force_angle + kPi;
    q.sector_angle = std::fmod(center, kTwoPi);
    if (q.sector_angle < 0) q.sector_angle += kTwoPi;
    q.answer_yes = want_yes;
    q.prompt_text =
        "A blue sector is highlighted on every frame. Does the object's movement lie "
        "within the highlighted sector region? Answer yes or no.";
    return q;
}

Question make_magnitude_question(const VideoSample& sample, QAttr attr) {
    Question q;
    q.sample_id = sample.id;
    q.kind = QuestionKind::Magnitude;
    q.attribute = attr;
    q.answer_value = attribute_scalar(sample.props, attr);
    const char* what = nullptr;
    switch (attr) {
        case QAttr::Friction: what = "the friction coefficient between the object and the surface"; break;
        case QAttr::Restitution: what = "the coefficient of restitution of the object"; break;
        case QAttr::Deformation: what = "how deformable the object is"; break;
        case QAttr::ForceMagnitude: what = "the magnitude of the force applied to the object"; break;
        case QAttr::ForceDirection: what = "?"; break;
    }
    q.prompt_text = std::string("Ignore the object's appearance and focus on its motion. "
                                "Estimate ") +
                    what + " as a number between 0 and 1.";
    return q;
}

}  // namespace

std::vector<Question> make_questions(const VideoSample& sample, Rng& rng) {
    std::vector<Question> out;
    auto active = [&](sim::Attribute a) {
        return std::find(sample.active_attributes.begin(), sample.active_attributes.end(), a) !=
               sample.active_attributes.end();
    };
    std::vector<QAttr> scalar_attrs;
    if (active(sim::Attribute::Friction)) scalar_attrs.push_back(QAttr::Friction);
    if (active(sim::Attribute::Restitution)) scalar_attrs.push_back(QAttr::Restitution);
    if (active(sim::Attribute::Deformation)) scalar_attrs.push_back(QAttr::Deformation);
    if (active(sim::Attribute::Force)) scalar_attrs.push_back(QAttr::ForceMagnitude);

    for (QAttr attr : scalar_attrs) {
        for (int i = 0; i < 2; ++i) out.push_back(make_range_question(sample, attr, true, rng));
        for (int i = 0; i < 2; ++i) out.push_back(make_range_question(sample, attr, false, rng));
        out.push_back(make_magnitude_question(sample, attr));
    }
    if (active(sim::Attribute::Force)) {
        out.push_back(make_sector_question(sample, true, rng));
        out.push_back(make_sector_question(sample, false, rng));
    }
    return out;
}

namespace {

json question_to_json(const Question& q) {
    json j{{"sample_id", q.sample_id},
           {"kind", question_kind_name(q.kind)},
           {"attribute", qattr_name(q.attribute)},
           {"prompt", q.prompt_text}};
    if (q.kind == QuestionKind::RangeYesNo) {
        j["min_val"] = q.min_val;
        j["max_val"] = q.max_val;
        j["answer"] = q.answer_yes ? "yes" : "no";
    } else if (q.kind == QuestionKind::Sector) {
        j["sector_angle"] = q.sector_angle;
        j["sector_width"] = q.sector_width;
        j["answer"] = q.answer_yes ? "yes" : "no";
    } else {
        j["answer"] = q.answer_value;
    }
    return j;
}

Question question_from_json(const json& j) {
    Question q;
    q.sample_id = j.at("sample_id");
    q.kind = question_kind_from_name(j.at("kind"));
    q.attribute = qattr_from_name(j.at("attribute"));
    q.prompt_text = j.value("prompt", "");
    if (q.kind == QuestionKind::RangeYesNo) {
        q.min_val = j.at("min_val");
        q.max_val = j.at("max_val");
        q.answer_yes = j.at("answer") == "yes";
    } else if (q.kind == QuestionKind::Sector) {
        q.sector_angle = j.at("sector_angle");
        q.sector_width = j.at("sector_width");
        q.answer_yes = j.at("answer") == "yes";
    } else {
        q.answer_value = j.at("answer");
    }
    return q;
}

}  // namespace

void save_sample(const VideoSample& sample, const fs::path& dir) {
    fs::create_directories(dir);
    write_f32(dir / "frames.bin", sample.frames.data);
    write_f32(dir / "props.bin", sample.property_map.data);

    json meta{
        {"schema_version", kManifestSchemaVersion},
        {"id", sample.id},
        {"seed", sample.seed},
        {"scenario", sim::scenario_name(sample.scenario_id)},
        {"props", props_to_json(sample.props)},
        {"text", sample.text},
        {"fps", sample.fps},
        {"force_window", {sample.force_window[0], sample.force_window[1]}},
        {"target_px", {sample.target_px[0], sample.target_px[1]}},
        {"shapes",
         {{"frames",
           {sample.frames.frames, sample.frames.channels, sample.frames.height,
            sample.frames.width}},
          {"props", {render::kMapChannels, sample.property_map.height,
                     sample.property_map.width}}}},
        {"checksums",
         {{"frames", checksum_hex(sample.frames.data)},
          {"props", checksum_hex(sample.property_map.data)}}},
    };
    json attrs = json::array();
    for (auto a : sample.active_attributes) attrs.push_back(attribute_name(a));
    meta["active_attributes"] = attrs;

    std::ofstream out(dir / "meta.json");
    out << meta.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + (dir / "meta.json").string());
}

VideoSample load_sample(const fs::path& dir) {
    std::ifstream in(dir / "meta.json");
    if (!in) throw LoadError("missing meta.json in " + dir.string());
    json meta = json::parse(in);
    if (meta.value("schema_version", -1) != kManifestSchemaVersion)
        throw VersionError("unsupported sample schema version in " + dir.string());

    VideoSample s;
    s.id = meta.at("id");
    s.seed = meta.at("seed");
    s.scenario_id = sim::scenario_from_name(meta.at("scenario"));
    s.props = props_from_json(meta.at("props"));
    s.text = meta.value("text", "");
    s.fps = meta.value("fps", 12.0);
    s.force_window = {meta.at("force_window")[0], meta.at("force_window")[1]};
    s.target_px = {meta.at("target_px")[0], meta.at("target_px")[1]};
    for (const auto& a : meta.at("active_attributes"))
        s.active_attributes.push_back(attribute_from_name(a));

    auto fshape = meta.at("shapes").at("frames");
    int t = fshape[0], c = fshape[1], h = fshape[2], w = fshape[3];
    s.frames = Video(t, c, h, w);
    s.frames.data = read_f32(dir / "frames.bin", size_t(t) * c * h * w);
    auto pshape = meta.at("shapes").at("props");
    int pk = pshape[0], ph = pshape[1], pw = pshape[2];
    if (pk != render::kMapChannels)
        throw ShapeError("unexpected property-map channel count in " + dir.string());
    s.property_map = render::PropertyMap(ph, pw);
    s.property_map.data = read_f32(dir / "props.bin", size_t(pk) * ph * pw);

    auto sums = meta.at("checksums");
    if (checksum_hex(s.frames.data) != sums.at("frames"))
        throw ChecksumError("frames checksum mismatch: " + (dir / "frames.bin").string());
    if (checksum_hex(s.property_map.data) != sums.at("props"))
        throw ChecksumError("props checksum mismatch: " + (dir / "props.bin").string());
    return s;
}

namespace {

json manifest_to_json(const DatasetManifest& m) {
    json samples = json::array();
    for (const auto& e : m.samples)
        samples.push_back(json{{"id", e.id},
                               {"path", e.path},
                               {"seed", e.seed},
                               {"scenario", e.scenario},
                               {"split", e.split}});
    return json{{"schema_version", m.schema_version},
                {"master_seed", m.master_seed},
                {"resolution", m.resolution},
                {"frames", m.frames},
                {"fps", m.fps},
                {"config_hash", m.config_hash},
                {"count", m.samples.size()},
                {"samples", samples},
                {"skipped_seeds", m.skipped_seeds}};
}

}  // namespace

void save_manifest(const DatasetManifest& m, const fs::path& dataset_dir) {
    fs::create_directories(dataset_dir);
    fs::path tmp = dataset_dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        out << manifest_to_json(m).dump(2) << "\n";
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, dataset_dir / "manifest.json");
}

DatasetManifest load_manifest(const fs::path& dataset_dir) {
    std::ifstream in(dataset_dir / "manifest.json");
    if (!in) throw LoadError("missing manifest.json in " + dataset_dir.string());
    json j = json::parse(in);
    if (j.value("schema_version", -1) != kManifestSchemaVersion)
        throw VersionError("unsupported manifest schema version in " + dataset_dir.string());
    DatasetManifest m;
    m.schema_version = j.at("schema_version");
    m.master_seed = j.at("master_seed");
    m.resolution = j.at("resolution");
    m.frames = j.at("frames");
    m.fps = j.at("fps");
    m.config_hash = j.at("config_hash");
    for (const auto& e : j.at("samples"))
        m.samples.push_back({e.at("id"), e.at("path"), e.at("seed"), e.at("scenario"),
                             e.at("split")});
    for (const auto& s : j.value("skipped_seeds", json::array()))
        m.skipped_seeds.push_back(s);
    size_t count = j.at("count");
    if (count != m.samples.size())
        throw ShapeError("manifest count disagrees with sample list in " + dataset_dir.string());
    return m;
}

std::vector<DatasetManifest::Entry> DatasetManifest::split(const std::string& name) const {
    std::vector<Entry> out;
    for (const auto& e : samples)
        if (e.split == name) out.push_back(e);
    return out;
}

std::string manifest_hash(const DatasetManifest& m) {
    std::string body = manifest_to_json(m).dump();
    return sha256_hex(body.data(), body.size());
}

void save_questions(const std::vector<Question>& questions, const fs::path& file) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file);
    for (const auto& q : questions) out << question_to_json(q).dump() << "\n";
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::vector<Question> load_questions(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("missing question file: " + file.string());
    std::vector<Question> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(question_from_json(json::parse(line)));
    }
    return out;
}

DatasetManifest generate_dataset(const DataConfig& config) {
    fs::create_directories(config.out_dir / "samples");
    DatasetManifest manifest;
    manifest.master_seed = config.master_seed;
    manifest.resolution = config.resolution;
    manifest.frames = config.frames;
    manifest.fps = config.fps;
    {
        std::ostringstream cfg;
        cfg << config.n_samples << "|" << config.frames << "|" << config.resolution << "|"
            << config.fps << "|" << config.master_seed;
        manifest.config_hash = sha256_hex(cfg.str().data(), cfg.str().size());
    }

    std::vector<Question> train_q, val_q, test_q;
    for (int i = 0; i < config.n_samples; ++i) {
        auto scenario = static_cast<sim::ScenarioId>(i % sim::kScenarioCount);
        auto spec = sim::ScenarioSpec::standard(scenario);
        uint64_t seed = Rng::mix(config.master_seed, uint64_t(i) + 1);
        Rng prop_rng = Rng(seed).fork("props");
        auto props = sample_properties(spec, prop_rng);

        VideoSample sample;
        try {
            sample = build_sample(spec, props, seed, config.frames, config.resolution,
                                  config.fps);
        } catch (const sim::SimulationError&) {
            manifest.skipped_seeds.push_back(seed);
            continue;
        }
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "%06d", i);
        sample.id = idbuf;

        std::string split = (i % 10 == 0) ? "test" : (i % 10 == 1) ? "val" : "train";
        std::string rel = std::string("samples/") + sample.id;
        save_sample(sample, config.out_dir / rel);
        manifest.samples.push_back(
            {sample.id, rel, seed, sim::scenario_name(scenario), split});

        Rng q_rng = Rng(seed).fork("questions");
        auto qs = make_questions(sample, q_rng);
        auto& bucket = split == "test" ? test_q : split == "val" ? val_q : train_q;
        bucket.insert(bucket.end(), qs.begin(), qs.end());
    }

    save_questions(train_q, config.out_dir / "questions" / "train.jsonl");
    save_questions(val_q, config.out_dir / "questions" / "val.jsonl");
    save_questions(test_q, config.out_dir / "questions" / "test.jsonl");
    save_manifest(manifest, config.out_dir);
    return manifest;
}

int audit_questions(const fs::path& dataset_dir) {
    auto manifest = load_manifest(dataset_dir);
    std::map<std::string, sim::PhysicalProperties> props;
    for (const auto& e : manifest.samples) {
        auto s = load_sample(dataset_dir / e.path);
        props[e.id] = s.props;
    }
    int bad = 0;
    for (const char* split : {"train", "val", "test"}) {
        auto qs = load_questions(dataset_dir / "questions" / (std::string(split) + ".jsonl"));
        for (const auto& q : qs) {
            auto it = props.find(q.sample_id);
            if (it == props.end()) {
                ++bad;
                continue;
            }
            if (q.kind == QuestionKind::Magnitude) {
                if (std::abs(attribute_scalar(it->second, q.attribute) - q.answer_value) > 1e-9)
                    ++bad;
            } else if (evaluate_yesno(q, it->second) != q.answer_yes) {
                ++bad;
            }
        }
    }
    return bad;
}

}  // namespace physvid::data
