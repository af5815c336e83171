#include "nesy/tasks/shapes.h"

#include "nesy/error.h"
#include "nesy/tasks/idx.h"
#include "nesy/tasks/jsonl.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <random>
#include <sstream>

namespace nesy::tasks {

namespace {

constexpr const char* kShapeNames[] = {"circle", "square", "triangle"};
constexpr const char* kColorNames[] = {"red", "green", "blue", "yellow"};
constexpr std::uint8_t kPalette[4][3] = {{215, 40, 40}, {40, 175, 60}, {45, 75, 220}, {230, 205, 40}};
constexpr int kMinSide = 14;
constexpr int kMaxSide = 24;
constexpr int kGap = 2;

bool intersects(const SceneObject& a, const SceneObject& b, int gap) {
    return a.bbox[0] < b.bbox[2] + gap && b.bbox[0] < a.bbox[2] + gap && a.bbox[1] < b.bbox[3] + gap &&
           b.bbox[1] < a.bbox[3] + gap;
}

bool isBlueCircle(const SceneObject& o) {
    return o.color == ShapeColor::Blue && o.shape == ShapeKind::Circle;
}

/** Smallest |dy| over red / blue-circle pairs, or a large number when there is none. */
double closestQueryPair(const std::vector<SceneObject>& objects) {
    double best = 1e9;
    for (const auto& a : objects) {
        for (const auto& b : objects) {
            if (&a != &b && a.color == ShapeColor::Red && isBlueCircle(b)) {
                best = std::min(best, std::abs(a.centerY() - b.centerY()));
            }
        }
    }
    return best;
}

class SceneBuilder {
public:
    explicit SceneBuilder(std::uint64_t seed) : rng_(seed) {}

    std::vector<SceneObject> positive() {
        for (;;) {
            std::vector<SceneObject> objects;
            SceneObject red = object(randomShape(), ShapeColor::Red);
            SceneObject blue = object(ShapeKind::Circle, ShapeColor::Blue);
            if (red.centerY() > blue.centerY() - kAboveMargin || intersects(red, blue, kGap)) {
                continue;
            }
            objects = {red, blue};
            if (addDistractors(objects, 1 + pick(3)) && sceneAnswer(objects)) {
                return objects;
            }
        }
    }

    std::vector<SceneObject> negative(bool hard) {
        for (;;) {
            std::vector<SceneObject> objects;
            if (hard) {
                SceneObject red = object(randomShape(), ShapeColor::Red);
                SceneObject blue = object(ShapeKind::Circle, ShapeColor::Blue);
                if (red.centerY() < blue.centerY() + kAboveMargin || intersects(red, blue, kGap)) {
                    continue;
                }
                objects = {red, blue};
            } else {
                objects = {object(randomShape(), randomColor())};
                if (!addDistractors(objects, 1)) {
                    continue;
                }
            }
            if (addDistractors(objects, 1 + pick(3)) && !sceneAnswer(objects) &&
                    closestQueryPair(objects) >= kAboveMargin) {
                return objects;
            }
        }
    }

    RgbImage render(const std::vector<SceneObject>& objects) {
        RgbImage img{kSceneSide, kSceneSide, std::vector<std::uint8_t>(kSceneSide * kSceneSide * 3)};
        std::normal_distribution<double> noise(0.0, 6.0);
        for (auto& px : img.pixels) {
            px = clampByte(235.0 + noise(rng_));
        }
        std::uniform_int_distribution<int> jitter(-20, 20);
        for (const auto& o : objects) {
            int tint[3];
            for (int c = 0; c < 3; ++c) {
                tint[c] = kPalette[static_cast<int>(o.color)][c] + jitter(rng_);
            }
            for (int y = o.bbox[1]; y < o.bbox[3]; ++y) {
                for (int x = o.bbox[0]; x < o.bbox[2]; ++x) {
                    if (!covers(o, x + 0.5, y + 0.5)) {
                        continue;
                    }
                    std::size_t at = (static_cast<std::size_t>(y) * kSceneSide + static_cast<std::size_t>(x)) * 3;
                    for (int c = 0; c < 3; ++c) {
                        img.pixels[at + static_cast<std::size_t>(c)] = clampByte(tint[c] + noise(rng_));
                    }
                }
            }
        }
        return img;
    }

    std::size_t pick(std::size_t n) {
        return static_cast<std::size_t>(rng_() % n);
    }

    std::mt19937_64& rng() {
        return rng_;
    }

private:
    static std::uint8_t clampByte(double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }

    static bool covers(const SceneObject& o, double x, double y) {
        double w = o.bbox[2] - o.bbox[0];
        double h = o.bbox[3] - o.bbox[1];
        double u = (x - o.bbox[0]) / w;
        double v = (y - o.bbox[1]) / h;
        switch (o.shape) {
        case ShapeKind::Circle:
            return (u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5) <= 0.25;
        case ShapeKind::Square:
            return true;
        case ShapeKind::Triangle:
            return std::abs(u - 0.5) <= 0.5 * v;
        }
        return false;
    }

    ShapeKind randomShape() {
        return static_cast<ShapeKind>(pick(3));
    }

    ShapeColor randomColor() {
        return static_cast<ShapeColor>(pick(4));
    }

    SceneObject object(ShapeKind shape, ShapeColor color) {
        int side = kMinSide + static_cast<int>(pick(kMaxSide - kMinSide + 1));
        int x0 = static_cast<int>(pick(kSceneSide - static_cast<std::size_t>(side) + 1));
        int y0 = static_cast<int>(pick(kSceneSide - static_cast<std::size_t>(side) + 1));
        SceneObject o;
        o.shape = shape;
        o.color = color;
        o.bbox = {x0, y0, x0 + side, y0 + side};
        return o;
    }

    bool addDistractors(std::vector<SceneObject>& objects, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
                SceneObject o = object(randomShape(), randomColor());
                if (std::none_of(objects.begin(), objects.end(),
                            [&](const SceneObject& other) { return intersects(o, other, kGap); })) {
                    objects.push_back(o);
                    placed = true;
                }
            }
            if (!placed) {
                return false;
            }
        }
        return true;
    }

    std::mt19937_64 rng_;
};

nlohmann::json toJson(const Scene& s) {
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& o : s.objects) {
        objects.push_back({{"shape", shapeName(o.shape)}, {"color", colorName(o.color)},
                {"bbox", {o.bbox[0], o.bbox[1], o.bbox[2], o.bbox[3]}}});
    }
    return {{"id", s.id}, {"split", s.split}, {"label", s.label ? "yes" : "no"}, {"question", kShapesQuestion},
            {"above_margin_px", kAboveMargin}, {"image", "images/" + s.id + ".ppm"}, {"objects", objects}};
}

}  // namespace

std::string shapeName(ShapeKind s) {
    return kShapeNames[static_cast<int>(s)];
}

std::string colorName(ShapeColor c) {
    return kColorNames[static_cast<int>(c)];
}

ShapeKind parseShape(const std::string& s) {
    for (int i = 0; i < 3; ++i) {
        if (s == kShapeNames[i]) {
            return static_cast<ShapeKind>(i);
        }
    }
    throw Error(ErrorCode::DataError, "unknown shape '" + s + "'", s);
}

ShapeColor parseColor(const std::string& s) {
    for (int i = 0; i < 4; ++i) {
        if (s == kColorNames[i]) {
            return static_cast<ShapeColor>(i);
        }
    }
    throw Error(ErrorCode::DataError, "unknown color '" + s + "'", s);
}

bool sceneAnswer(const std::vector<SceneObject>& objects) {
    for (const auto& a : objects) {
        for (const auto& b : objects) {
            if (&a != &b && a.color == ShapeColor::Red && isBlueCircle(b) && a.centerY() < b.centerY()) {
                return true;
            }
        }
    }
    return false;
}

bool nonOverlapping(const std::vector<SceneObject>& objects) {
    int side = static_cast<int>(kSceneSide);
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& b = objects[i].bbox;
        if (b[0] < 0 || b[1] < 0 || b[2] > side || b[3] > side || b[0] >= b[2] || b[1] >= b[3]) {
            return false;
        }
        for (std::size_t j = i + 1; j < objects.size(); ++j) {
            if (intersects(objects[i], objects[j], 0)) {
                return false;
            }
        }
    }
    return true;
}

std::size_t distractorCount(const Scene& scene) {
    return scene.objects.size() < 2 ? 0 : scene.objects.size() - 2;
}

ShapesData gen_shapes(std::uint64_t seed, std::size_t count) {
    SceneBuilder builder(seed);
    ShapesData out;
    std::size_t perSplit[2] = {count / 2 + count % 2, count / 2};
    const char* names[2] = {"train", "test"};
    for (int split = 0; split < 2; ++split) {
        std::size_t n = perSplit[split];
        std::vector<bool> labels(n, false);
        std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n / 2), true);
        std::shuffle(labels.begin(), labels.end(), builder.rng());
        auto& scenes = split == 0 ? out.train : out.test;
        std::size_t negatives = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Scene s;
            std::ostringstream id;
            id << names[split] << "_" << std::setw(4) << std::setfill('0') << i;
            s.id = id.str();
            s.split = names[split];
            s.objects = labels[i] ? builder.positive() : builder.negative(negatives++ % 2 == 0);
            s.label = sceneAnswer(s.objects);
            s.image = builder.render(s.objects);
            scenes.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<std::uint8_t> encodePpm(const RgbImage& image) {
    std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    return out;
}

RgbImage decodePpm(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto token = [&]() {
        for (;;) {
            while (pos < bytes.size() && std::isspace(bytes[pos])) {
                ++pos;
            }
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
                continue;
            }
            break;
        }
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) {
            t += static_cast<char>(bytes[pos++]);
        }
        return t;
    };
    if (token() != "P6") {
        throw Error(ErrorCode::DataError, "not a binary PPM (P6) image");
    }
    RgbImage img;
    try {
        img.width = std::stoul(token());
        img.height = std::stoul(token());
        if (std::stoul(token()) != 255) {
            throw Error(ErrorCode::DataError, "PPM maxval must be 255");
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::DataError, "malformed PPM header");
    }
    ++pos;
    std::size_t need = img.width * img.height * 3;
    if (pos + need != bytes.size()) {
        throw Error(ErrorCode::DataError, "PPM payload size does not match its header");
    }
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return img;
}

std::vector<std::filesystem::path> writeShapes(const ShapesData& data, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "images", ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + (dir / "images").string() + ": " + ec.message(),
                (dir / "images").string());
    }
    std::vector<std::filesystem::path> written;
    std::vector<nlohmann::json> records;
    for (const auto* split : {&data.train, &data.test}) {
        for (const auto& s : *split) {
            auto path = dir / "images" / (s.id + ".ppm");
            writeFile(path, encodePpm(s.image));
            written.push_back(path);
            records.push_back(toJson(s));
        }
    }
    writeJsonl(dir / kShapesAnnotations, records);
    written.push_back(dir / kShapesAnnotations);
    return written;
}

ShapesData readShapes(const std::filesystem::path& dir) {
    auto path = dir / kShapesAnnotations;
    auto records = readJsonl(path);
    ShapesData out;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& j = records[r];
        Scene s = decodeRecord(path, r + 1, [&] {
            Scene s;
            s.id = j.at("id").get<std::string>();
            s.split = j.at("split").get<std::string>();
            s.label = j.at("label").get<std::string>() == "yes";
            for (const auto& o : j.at("objects")) {
                SceneObject obj;
                obj.shape = parseShape(o.at("shape").get<std::string>());
                obj.color = parseColor(o.at("color").get<std::string>());
                auto b = o.at("bbox").get<std::vector<int>>();
                if (b.size() != 4) {
                    throwRecordError(path, r + 1, "bbox needs four numbers");
                }
                std::copy(b.begin(), b.end(), obj.bbox.begin());
                s.objects.push_back(obj);
            }
            s.image = decodePpm(readFile(dir / j.at("image").get<std::string>()));
            return s;
        });
        if (s.image.width != kSceneSide || s.image.height != kSceneSide) {
            throw Error(ErrorCode::DataError, "scene " + s.id + " is not 128x128", s.id);
        }
        if (!nonOverlapping(s.objects)) {
            throw Error(ErrorCode::DataError, "scene " + s.id + " has overlapping or out-of-frame boxes", s.id);
        }
        (s.split == "test" ? out.test : out.train).push_back(std::move(s));
    }
    return out;
}

std::vector<double> objectCrop(const RgbImage& image, const SceneObject& object) {
    std::vector<double> out(kCropFeatures, 0.0);
    double w = object.bbox[2] - object.bbox[0];
    double h = object.bbox[3] - object.bbox[1];
    for (std::size_t v = 0; v < kCropSide; ++v) {
        int y0 = object.bbox[1] + static_cast<int>(std::floor(h * static_cast<double>(v) / kCropSide));
        int y1 = std::max(y0 + 1, object.bbox[1] + static_cast<int>(std::ceil(h * static_cast<double>(v + 1) / kCropSide)));
        for (std::size_t u = 0; u < kCropSide; ++u) {
            int x0 = object.bbox[0] + static_cast<int>(std::floor(w * static_cast<double>(u) / kCropSide));
            int x1 = std::max(x0 + 1, object.bbox[0] + static_cast<int>(std::ceil(w * static_cast<double>(u + 1) / kCropSide)));
            double sum[3] = {0, 0, 0};
            int n = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    std::size_t at = (static_cast<std::size_t>(y) * image.width + static_cast<std::size_t>(x)) * 3;
                    for (int c = 0; c < 3; ++c) {
                        sum[c] += image.pixels[at + static_cast<std::size_t>(c)];
                    }
                    ++n;
                }
            }
            for (std::size_t c = 0; c < 3; ++c) {
                out[(v * kCropSide + u) * 3 + c] = sum[c] / (255.0 * n);
            }
        }
    }
    return out;
}

std::vector<double> pairFeatures(const SceneObject& a, const SceneObject& b) {
    double side = static_cast<double>(kSceneSide);
    auto put = [&](std::vector<double>& v, const SceneObject& o) {
        v.push_back(o.centerX() / side);
        v.push_back(o.centerY() / side);
        v.push_back((o.bbox[2] - o.bbox[0]) / side);
        v.push_back((o.bbox[3] - o.bbox[1]) / side);
    };
    std::vector<double> v;
    put(v, a);
    put(v, b);
    return v;
}

namespace {

std::string aboveHead(std::size_t i, std::size_t j) {
    return "above_" + std::to_string(i) + "_" + std::to_string(j);
}

}  // namespace

std::string shapesProgram(std::size_t objectCount) {
    std::ostringstream os;
    os << "rel color(int, int).\nrel shape(int, int).\nrel above(int, int).\nrel ans().\n";
    for (std::size_t i = 1; i <= objectCount; ++i) {
        for (int c = 0; c < 4; ++c) {
            os << (c ? "; " : "") << "nn(color_" << i << ", " << c << ")::color(" << i << ", " << c << ")";
        }
        os << ".\n";
        for (int s = 0; s < 3; ++s) {
            os << (s ? "; " : "") << "nn(shape_" << i << ", " << s << ")::shape(" << i << ", " << s << ")";
        }
        os << ".\n";
    }
    for (std::size_t i = 1; i <= objectCount; ++i) {
        for (std::size_t j = 1; j <= objectCount; ++j) {
            if (i != j) {
                os << "nn(" << aboveHead(i, j) << ", 1)::above(" << i << ", " << j << ").\n";
            }
        }
    }
    os << "ans() :- color(I, 0), color(J, 2), shape(J, 0), above(I, J).\n";
    os << "query ans().\n";
    return os.str();
}

std::vector<HeadCall> shapesCalls(const Scene& scene) {
    std::vector<HeadCall> calls;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        auto crop = objectCrop(scene.image, scene.objects[i]);
        calls.push_back({0, "color_" + std::to_string(i + 1), crop});
        calls.push_back({1, "shape_" + std::to_string(i + 1), std::move(crop)});
    }
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        for (std::size_t j = 0; j < scene.objects.size(); ++j) {
            if (i != j) {
                calls.push_back({2, aboveHead(i + 1, j + 1), pairFeatures(scene.objects[i], scene.objects[j])});
            }
        }
    }
    return calls;
}

reasoner::NeuralOutputs groundTruthOutputs(const Scene& scene) {
    reasoner::NeuralOutputs out;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& o = scene.objects[i];
        std::vector<double> color(4, 0.0);
        std::vector<double> shape(3, 0.0);
        color[static_cast<std::size_t>(o.color)] = 1.0;
        shape[static_cast<std::size_t>(o.shape)] = 1.0;
        out["color_" + std::to_string(i + 1)] = color;
        out["shape_" + std::to_string(i + 1)] = shape;
        for (std::size_t j = 0; j < scene.objects.size(); ++j) {
            if (i != j) {
                bool above = o.centerY() < scene.objects[j].centerY();
                out[aboveHead(i + 1, j + 1)] = {above ? 0.0 : 1.0, above ? 1.0 : 0.0};
            }
        }
    }
    return out;
}

TaskResult run_shapes(const RunConfig& config) {
    config.validate();
    ShapesData data;
    if (config.dataDir.empty()) {
        data = gen_shapes(config.seed, config.trainCount + config.testCount);
    } else {
        data = readShapes(config.dataDir);
    }
    HeadSet heads;
    heads.add(neural::Network::mlp("color", {kCropFeatures, 32, 4}, true, config.seed),
            neural::OptimizerSpec::adam(config.lr));
    heads.add(neural::Network::mlp("shape", {kCropFeatures, 32, 3}, true, config.seed + 1),
            neural::OptimizerSpec::adam(config.lr));
    heads.add(neural::Network::mlp("relation", {kPairFeatures, 16, 2}, true, config.seed + 2),
            neural::OptimizerSpec::adam(config.lr));
    heads.adopt(config);
    std::map<std::size_t, std::unique_ptr<ReasonerSession>> sessions;
    auto session = [&](std::size_t n) -> ReasonerSession& {
        auto& slot = sessions[n];
        if (!slot) {
            slot = std::make_unique<ReasonerSession>(shapesProgram(n), config.semiring);
        }
        return *slot;
    };
    auto answer = [&](ReasonerSession& s, const reasoner::NeuralOutputs& outputs) {
        auto rs = s.ask(outputs, s.queryAtom("ans"));
        return rs;
    };

    Metrics metrics;
    Stopwatch trainClock;
    double scale = 1.0 / static_cast<double>(config.batchSize);
    for (std::size_t epoch = 0; epoch < config.trainingEpochs(); ++epoch) {
        double epochLoss = 0.0;
        auto order = epochOrder(data.train.size(), config.seed, epoch);
        heads.zeroGrads();
        for (std::size_t step = 0; step < order.size(); ++step) {
            const Scene& scene = data.train[order[step]];
            auto calls = shapesCalls(scene);
            auto outputs = forwardCalls(heads, calls, true);
            auto& s = session(scene.objects.size());
            auto rs = answer(s, outputs);
            double p = rs.empty() ? 0.0 : rs.front().probability;
            auto loss = binaryNll(p, scene.label);
            epochLoss += loss.loss;
            reasoner::NeuralOutputs grads;
            if (!rs.empty() && rs.front().grad) {
                s.addGradient(*rs.front().grad, loss.grad[0] * scale, outputs, grads);
            }
            backwardCalls(heads, calls, grads);
            if ((step + 1) % config.batchSize == 0 || step + 1 == order.size()) {
                heads.step(config);
                heads.zeroGrads();
            }
        }
        metrics.epochLoss.push_back(epochLoss / static_cast<double>(order.size()));
    }
    metrics.trainMsPerSample = perSample(trainClock.ms(), config.trainingEpochs() * data.train.size());

    std::size_t hits = 0;
    std::size_t colorHits = 0;
    std::size_t shapeHits = 0;
    std::size_t objects = 0;
    Stopwatch testClock;
    for (const auto& scene : data.test) {
        auto calls = shapesCalls(scene);
        auto outputs = forwardCalls(heads, calls, false);
        auto rs = answer(session(scene.objects.size()), outputs);
        double p = rs.empty() ? 0.0 : rs.front().probability;
        hits += (p > 0.5) == scene.label;
        for (std::size_t i = 0; i < scene.objects.size(); ++i) {
            colorHits += neural::argmax(outputs["color_" + std::to_string(i + 1)]) ==
                         static_cast<std::size_t>(scene.objects[i].color);
            shapeHits += neural::argmax(outputs["shape_" + std::to_string(i + 1)]) ==
                         static_cast<std::size_t>(scene.objects[i].shape);
        }
        objects += scene.objects.size();
    }
    double n = static_cast<double>(data.test.size());
    metrics.testMsPerSample = testClock.ms() / n;
    metrics.values["answer_accuracy"] = static_cast<double>(hits) / n;
    metrics.values["color_accuracy"] = static_cast<double>(colorHits) / static_cast<double>(objects);
    metrics.values["shape_accuracy"] = static_cast<double>(shapeHits) / static_cast<double>(objects);
    TaskResult out;
    out.metrics = std::move(metrics);
    out.heads = heads.release();
    return out;
}

}  // namespace nesy::tasks
