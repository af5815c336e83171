#pragma once

#include "nesy/tasks/common.h"

#include <array>
#include <filesystem>

namespace nesy::tasks {

inline constexpr std::size_t kSceneSide = 128;
inline constexpr std::size_t kCropSide = 16;
inline constexpr std::size_t kCropFeatures = kCropSide * kCropSide * 3;
inline constexpr std::size_t kPairFeatures = 8;
inline constexpr int kAboveMargin = 4;
inline constexpr std::size_t kMaxObjects = 5;
inline constexpr const char* kShapesQuestion = "Is there a red shape above a blue circle?";
inline constexpr const char* kShapesAnnotations = "shapes.jsonl";

enum class ShapeKind { Circle = 0, Square = 1, Triangle = 2 };
enum class ShapeColor { Red = 0, Green = 1, Blue = 2, Yellow = 3 };

std::string shapeName(ShapeKind s);
std::string colorName(ShapeColor c);
ShapeKind parseShape(const std::string& s);
ShapeColor parseColor(const std::string& s);

struct SceneObject {
    ShapeKind shape = ShapeKind::Circle;
    ShapeColor color = ShapeColor::Red;
    /** Inclusive-exclusive pixel box [x0, y0, x1, y1). */
    std::array<int, 4> bbox{};

    double centerX() const {
        return (bbox[0] + bbox[2]) / 2.0;
    }
    double centerY() const {
        return (bbox[1] + bbox[3]) / 2.0;
    }
};

/** Row-major 8-bit RGB image. */
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;
};

struct Scene {
    std::string id;
    std::string split;
    bool label = false;
    std::vector<SceneObject> objects;
    RgbImage image;
};

struct ShapesData {
    std::vector<Scene> train;
    std::vector<Scene> test;
};

/** Some red object's center lies strictly above (smaller y) some blue circle's center. */
bool sceneAnswer(const std::vector<SceneObject>& objects);
/** No two bounding boxes intersect and all lie inside the canvas. */
bool nonOverlapping(const std::vector<SceneObject>& objects);
/** Objects beyond the two query-relevant ones: 1..3 for every generated scene. */
std::size_t distractorCount(const Scene& scene);

/**
 * count scenes split evenly into train and test, each split exactly half
 * yes. Positives put a red object at least kAboveMargin px above a blue
 * circle; half the negatives hold a red object and a blue circle in the
 * wrong order. Every scene has 1-3 distractors.
 */
ShapesData gen_shapes(std::uint64_t seed, std::size_t count = 2000);

/** Writes images/<id>.ppm and one annotation line per scene; returns the written paths. */
std::vector<std::filesystem::path> writeShapes(const ShapesData& data, const std::filesystem::path& dir);
/** Reads a directory produced by writeShapes. Throws IoError, DataError. */
ShapesData readShapes(const std::filesystem::path& dir);

std::vector<std::uint8_t> encodePpm(const RgbImage& image);
/** Binary P6 with maxval 255. Throws DataError. */
RgbImage decodePpm(const std::vector<std::uint8_t>& bytes);

/** Crop of the object's box resampled to 16x16, channel-interleaved, in [0,1]. */
std::vector<double> objectCrop(const RgbImage& image, const SceneObject& object);
/** Center, width and height of both boxes, scaled by the canvas side. */
std::vector<double> pairFeatures(const SceneObject& a, const SceneObject& b);

/**
 * Program over n objects: categorical heads color_i (4 outputs) and
 * shape_i (3), an independent head above_i_j per ordered pair, and
 * ans() :- color(I,0), color(J,2), shape(J,0), above(I,J).
 */
std::string shapesProgram(std::size_t objectCount);

/** Nets: 0 color, 1 shape, 2 relation. */
std::vector<HeadCall> shapesCalls(const Scene& scene);

/** Head outputs that put all mass on the annotated attributes and true geometry. */
reasoner::NeuralOutputs groundTruthOutputs(const Scene& scene);

/**
 * Trains color, shape and relation heads from the yes/no answer only.
 * Reports answer_accuracy on the test split.
 */
TaskResult run_shapes(const RunConfig& config);

}  // namespace nesy::tasks
