#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "physvid/image.hpp"
#include "physvid/render.hpp"
#include "physvid/rng.hpp"
#include "physvid/simcore.hpp"

namespace physvid::data {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr double kRangeWindowWidth = 0.2;
inline constexpr double kSectorWidthDefault = 3.14159265358979323846 / 6.0;  // 30 degrees
inline constexpr double kSectorAlphaDefault = 0.35;

struct VideoSample {
    std::string id;
    Video frames;                     // T x 3 x H x W in [0,1]
    render::PropertyMap property_map; // aligned to frame 0
    sim::PhysicalProperties props;    // raw values
    sim::ScenarioId scenario_id = sim::ScenarioId::SlideBlock;
    std::vector<sim::Attribute> active_attributes;
    uint64_t seed = 0;
    std::string text;                      // scene description, metadata only
    std::array<int, 2> force_window = {0, 0};  // [first, last)
    std::array<double, 2> target_px = {0, 0};  // frame-0 centroid of the target body
    double fps = 12.0;
};

enum class QuestionKind { RangeYesNo, Sector, Magnitude };
enum class QAttr { Friction, Restitution, Deformation, ForceMagnitude, ForceDirection };

const char* question_kind_name(QuestionKind k);
QuestionKind question_kind_from_name(const std::string& s);
const char* qattr_name(QAttr a);
QAttr qattr_from_name(const std::string& s);

// Scalar in [0,1] the question compares against (deformation -> deformability).
double attribute_scalar(const sim::PhysicalProperties& props, QAttr attr);

struct Question {
    std::string sample_id;
    QuestionKind kind = QuestionKind::RangeYesNo;
    QAttr attribute = QAttr::Friction;
    double min_val = 0.0;
    double max_val = 0.0;
    double sector_angle = 0.0;
    double sector_width = kSectorWidthDefault;
    bool answer_yes = false;   // range/sector kinds
    double answer_value = 0.0; // magnitude kind
    std::string prompt_text;
};

// Evaluates what the correct answer to a yes/no question is for given props.
bool evaluate_yesno(const Question& q, const sim::PhysicalProperties& props);

struct DatasetManifest {
    int schema_version = kManifestSchemaVersion;
    uint64_t master_seed = 0;
    int resolution = 0;
    int frames = 0;
    double fps = 12.0;
    std::string config_hash;
    struct Entry {
        std::string id;
        std::string path;  // relative sample directory
        uint64_t seed;
        std::string scenario;
        std::string split;  // train | val | test
    };
    std::vector<Entry> samples;
    std::vector<uint64_t> skipped_seeds;

    std::vector<Entry> split(const std::string& name) const;
};

struct DataConfig {
    std::filesystem::path out_dir;
    int n_samples = 5000;
    int frames = 24;
    int resolution = 64;
    double fps = 12.0;
    uint64_t master_seed = 0;
};

// simulate -> rasterize frames -> rasterize property map; deterministic.
VideoSample build_sample(const sim::ScenarioSpec& spec, const sim::PhysicalProperties& props,
                         uint64_t seed, int frames, int resolution, double fps = 12.0);

// Uniform attribute sampling for a scenario's active set; inactive neutral.
sim::PhysicalProperties sample_properties(const sim::ScenarioSpec& spec, Rng& rng);

// Generates N samples round-robin over scenarios, writes questions per split,
// then the manifest (atomically, last).
DatasetManifest generate_dataset(const DataConfig& config);

// Balanced question set for one sample; yes/no counts match by construction.
std::vector<Question> make_questions(const VideoSample& sample, Rng& rng);

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VersionError : LoadError {
    using LoadError::LoadError;
};
struct ShapeError : LoadError {
    using LoadError::LoadError;
};
struct ChecksumError : LoadError {
    using LoadError::LoadError;
};

void save_sample(const VideoSample& sample, const std::filesystem::path& sample_dir);
VideoSample load_sample(const std::filesystem::path& sample_dir);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& dataset_dir);
DatasetManifest load_manifest(const std::filesystem::path& dataset_dir);

void save_questions(const std::vector<Question>& questions, const std::filesystem::path& file);
std::vector<Question> load_questions(const std::filesystem::path& file);

// Recomputes every stored answer from the stored raw props; returns the
// number of inconsistencies (0 on a healthy dataset).
int audit_questions(const std::filesystem::path& dataset_dir);

// Stable content hash of a manifest (for byte-reproducibility checks).
std::string manifest_hash(const DatasetManifest& manifest);

}  // namespace physvid::data
