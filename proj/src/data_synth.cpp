#include "se3diffreg/data_synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "se3diffreg/errors.hpp"

namespace se3diffreg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// Shape dimensions, object diameter roughly 1 scene unit.
constexpr double kSphereRadius = 0.5;
const Vec3 kBoxHalfExtents(0.4, 0.3, 0.2);
constexpr double kTorusMajor = 0.35;
constexpr double kTorusMinor = 0.15;
const Vec3 kCompositeBoxHalf(0.3, 0.225, 0.15);
constexpr double kCompositeSphereRadius = 0.22;
const Vec3 kCompositeSphereCenter(0.15, 0.1, 0.25);

// Occlusion patch radius as a fraction of the model bounding radius.
constexpr double kOcclusionRadiusFraction = 0.25;

Vec3 sample_box_surface(const Vec3& half, Rng& rng) {
    const double ax = half.y() * half.z();
    const double ay = half.x() * half.z();
    const double az = half.x() * half.y();
    const double pick = uniform_real(rng, 0.0, ax + ay + az);
    const double sign = uniform_real(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    const double u = uniform_real(rng, -1.0, 1.0);
    const double v = uniform_real(rng, -1.0, 1.0);
    if (pick < ax) {
        return {sign * half.x(), u * half.y(), v * half.z()};
    }
    if (pick < ax + ay) {
        return {u * half.x(), sign * half.y(), v * half.z()};
    }
    return {u * half.x(), v * half.y(), sign * half.z()};
}

Vec3 sample_torus_surface(double major, double minor, Rng& rng) {
    for (;;) {
        const double u = uniform_real(rng, 0.0, 2.0 * kPi);
        const double v = uniform_real(rng, 0.0, 2.0 * kPi);
        // Acceptance weight keeps the sampling uniform in area.
        const double w = (major + minor * std::cos(v)) / (major + minor);
        if (uniform_real(rng, 0.0, 1.0) <= w) {
            const double ring = major + minor * std::cos(v);
            return {ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)};
        }
    }
}

Vec3 sample_composite_surface(Rng& rng) {
    const Vec3& h = kCompositeBoxHalf;
    const double box_area = 8.0 * (h.x() * h.y() + h.y() * h.z() + h.z() * h.x());
    const double sphere_area = 4.0 * kPi * kCompositeSphereRadius * kCompositeSphereRadius;
    if (uniform_real(rng, 0.0, box_area + sphere_area) < box_area) {
        return sample_box_surface(h, rng);
    }
    return kCompositeSphereCenter + kCompositeSphereRadius * uniform_unit_vector(rng);
}

std::string lowercase_extension(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

PointCloud load_xyz(const std::string& path) {
    std::ifstream in(path);
    PointCloud cloud;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        double x, y, z;
        if (!(row >> x)) {
            continue;  // blank line
        }
        if (!(row >> y >> z)) {
            throw ParseError("expected three coordinates", line_no);
        }
        std::string extra;
        if (row >> extra) {
            throw ParseError("trailing tokens after three coordinates", line_no);
        }
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
            throw ParseError("non-finite coordinate", line_no);
        }
        cloud.points.emplace_back(x, y, z);
    }
    if (cloud.empty()) {
        throw ParseError("no points in '" + path + "'", line_no);
    }
    return cloud;
}

PointCloud load_ply(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    long line_no = 0;

    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) {
            return false;
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    };

    if (!next_line() || line != "ply") {
        throw ParseError("missing 'ply' magic", line_no == 0 ? 1 : line_no);
    }

    long vertex_count = -1;
    int property_count = 0;
    int ix = -1, iy = -1, iz = -1;
    bool in_vertex_element = false;
    bool saw_format = false;
    for (;;) {
        if (!next_line()) {
            throw ParseError("unexpected end of header", line_no);
        }
        std::istringstream row(line);
        std::string word;
        row >> word;
        if (word == "comment" || word.empty()) {
            continue;
        }
        if (word == "format") {
            std::string fmt;
            row >> fmt;
            if (fmt != "ascii") {
                throw UnsupportedFormat("only ASCII PLY is supported, got '" + fmt + "'");
            }
            saw_format = true;
        } else if (word == "element") {
            std::string name;
            long count;
            if (!(row >> name >> count)) {
                throw ParseError("malformed element declaration", line_no);
            }
            in_vertex_element = (name == "vertex");
            if (in_vertex_element) {
                vertex_count = count;
            }
        } else if (word == "property" && in_vertex_element) {
            std::string type, name;
            if (!(row >> type >> name)) {
                throw ParseError("malformed property declaration", line_no);
            }
            if (type == "list") {
                throw ParseError("list property inside vertex element", line_no);
            }
            if (name == "x") {
                ix = property_count;
            } else if (name == "y") {
                iy = property_count;
            } else if (name == "z") {
                iz = property_count;
            }
            ++property_count;
        } else if (word == "end_header") {
            break;
        }
    }
    if (!saw_format) {
        throw ParseError("header lacks a format declaration", line_no);
    }
    if (vertex_count < 0 || ix < 0 || iy < 0 || iz < 0) {
        throw ParseError("vertex element with x/y/z properties not found", line_no);
    }

    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(vertex_count));
    for (long i = 0; i < vertex_count; ++i) {
        if (!next_line()) {
            throw ParseError("fewer vertex rows than declared", line_no);
        }
        std::istringstream row(line);
        std::vector<double> values;
        double v;
        while (row >> v) {
            values.push_back(v);
        }
        if (static_cast<int>(values.size()) < property_count) {
            throw ParseError("vertex row has too few values", line_no);
        }
        cloud.points.emplace_back(values[ix], values[iy], values[iz]);
    }
    if (cloud.empty()) {
        throw ParseError("PLY declares zero vertices", line_no);
    }
    return cloud;
}

Mat4 matrix_from_flat(const std::vector<double>& values) {
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            m(r, c) = values[static_cast<std::size_t>(r) * 4 + c];
        }
    }
    return m;
}

}  // namespace

ShapeKind shape_kind_from_string(const std::string& s) {
    if (s == "sphere") {
        return ShapeKind::sphere;
    }
    if (s == "box") {
        return ShapeKind::box;
    }
    if (s == "torus") {
        return ShapeKind::torus;
    }
    if (s == "composite") {
        return ShapeKind::composite;
    }
    throw ConfigError("unknown shape '" + s + "'");
}

const char* to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::sphere:
            return "sphere";
        case ShapeKind::box:
            return "box";
        case ShapeKind::torus:
            return "torus";
        default:
            return "composite";
    }
}

PointCloud sample_shape(ShapeKind kind, int n, Rng& rng) {
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) {
        switch (kind) {
            case ShapeKind::sphere:
                cloud.points.push_back(kSphereRadius * uniform_unit_vector(rng));
                break;
            case ShapeKind::box:
                cloud.points.push_back(sample_box_surface(kBoxHalfExtents, rng));
                break;
            case ShapeKind::torus:
                cloud.points.push_back(sample_torus_surface(kTorusMajor, kTorusMinor, rng));
                break;
            case ShapeKind::composite:
                cloud.points.push_back(sample_composite_surface(rng));
                break;
        }
    }
    return cloud;
}

RegistrationPair generate_pair(const GenSpec& spec, Rng& rng) {
    if (spec.n_source < 3 || spec.n_model < 3) {
        throw ConfigError("point counts must be >= 3");
    }
    if (!(spec.partial_fraction > 0.0 && spec.partial_fraction <= 1.0)) {
        throw ConfigError("partial_fraction must be in (0, 1]");
    }

    RegistrationPair pair;
    pair.id = std::string(to_string(spec.shape)) + "_s" + std::to_string(spec.seed);
    pair.model = sample_shape(spec.shape, spec.n_model, rng);

    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : pair.model.points) {
        centroid += p;
    }
    centroid /= static_cast<double>(pair.model.size());
    double bounding_radius = 0.0;
    for (const Vec3& p : pair.model.points) {
        bounding_radius = std::max(bounding_radius, (p - centroid).norm());
    }

    // View half-space: keep the partial_fraction quantile of projections
    // onto a random direction.
    std::vector<int> kept;
    if (spec.partial_fraction >= 1.0) {
        kept.resize(pair.model.size());
        for (std::size_t i = 0; i < pair.model.size(); ++i) {
            kept[i] = static_cast<int>(i);
        }
    } else {
        const Vec3 view = uniform_unit_vector(rng);
        std::vector<double> proj(pair.model.size());
        for (std::size_t i = 0; i < pair.model.size(); ++i) {
            proj[i] = view.dot(pair.model.points[i] - centroid);
        }
        std::vector<double> sorted = proj;
        const auto cutoff_rank = static_cast<std::size_t>(
            std::ceil(spec.partial_fraction * static_cast<double>(pair.model.size()))) - 1;
        std::nth_element(sorted.begin(), sorted.begin() + cutoff_rank, sorted.end());
        const double cutoff = sorted[cutoff_rank];
        for (std::size_t i = 0; i < pair.model.size(); ++i) {
            if (proj[i] <= cutoff) {
                kept.push_back(static_cast<int>(i));
            }
        }
    }

    const double occ_radius2 = std::pow(kOcclusionRadiusFraction * bounding_radius, 2);
    for (int patch = 0; patch < spec.occlusion_patches && !kept.empty(); ++patch) {
        const int center_slot = uniform_int(rng, 0, static_cast<int>(kept.size()) - 1);
        const Vec3 center = pair.model.points[static_cast<std::size_t>(kept[center_slot])];
        std::vector<int> remaining;
        remaining.reserve(kept.size());
        for (int idx : kept) {
            if ((pair.model.points[static_cast<std::size_t>(idx)] - center).squaredNorm() >
                occ_radius2) {
                remaining.push_back(idx);
            }
        }
        kept = std::move(remaining);
    }

    if (static_cast<int>(kept.size()) < spec.n_source) {
        throw InsufficientPoints("culling left " + std::to_string(kept.size()) +
                                 " points, need " + std::to_string(spec.n_source));
    }

    // Subsample to n_source without replacement (partial Fisher-Yates).
    for (int i = 0; i < spec.n_source; ++i) {
        const int j = uniform_int(rng, i, static_cast<int>(kept.size()) - 1);
        std::swap(kept[i], kept[j]);
    }
    kept.resize(static_cast<std::size_t>(spec.n_source));

    // Ground-truth pose: uniform axis, uniform angle in [0, max_rot],
    // translation uniform in the max_trans ball. Angles too close to pi are
    // re-drawn so that the pair stays on the log's principal branch.
    double angle = 0.0;
    Vec3 axis = Vec3::UnitZ();
    do {
        axis = uniform_unit_vector(rng);
        angle = uniform_real(rng, 0.0, spec.max_rot);
    } while (angle >= kPi - 1e-2);
    pair.h0 = exp(Twist{angle * axis, Vec3::Zero()});
    pair.h0.t = uniform_in_ball(rng, spec.max_trans);

    const RigidTransform h0_inv = inverse(pair.h0);
    pair.source.points.reserve(kept.size());
    std::vector<int> correspondences;
    correspondences.reserve(kept.size());
    for (int idx : kept) {
        Vec3 p = pair.model.points[static_cast<std::size_t>(idx)];
        if (spec.noise_sigma > 0.0) {
            p += spec.noise_sigma * normal3(rng);
        }
        pair.source.points.push_back(apply(h0_inv, p));
        correspondences.push_back(idx);
    }
    pair.correspondences = std::move(correspondences);
    return pair;
}

PointCloud load_cloud(const std::string& path) {
    if (!fs::exists(path)) {
        throw MissingFile("cloud file '" + path + "' does not exist");
    }
    const std::string ext = lowercase_extension(path);
    if (ext == ".xyz") {
        return load_xyz(path);
    }
    if (ext == ".ply") {
        return load_ply(path);
    }
    throw UnsupportedFormat("unsupported cloud format '" + ext + "' (use .xyz or .ply)");
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
    const std::string ext = lowercase_extension(path);
    std::ofstream out(path);
    if (!out) {
        throw MissingFile("cannot open '" + path + "' for writing");
    }
    char buf[96];
    if (ext == ".xyz") {
        for (const Vec3& p : cloud.points) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
            out << buf;
        }
    } else if (ext == ".ply") {
        out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
            << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
        for (const Vec3& p : cloud.points) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
            out << buf;
        }
    } else {
        throw UnsupportedFormat("unsupported cloud format '" + ext + "' (use .xyz or .ply)");
    }
}

RegistrationPair load_pair(const std::string& path) {
    if (!fs::exists(path)) {
        throw MissingFile("pair manifest '" + path + "' does not exist");
    }
    std::ifstream in(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("pair manifest: ") + e.what());
    }

    RegistrationPair pair;
    try {
        pair.id = doc.at("id").get<std::string>();
        const auto h0_values = doc.at("h0").get<std::vector<double>>();
        if (h0_values.size() != 16) {
            throw ParseError("h0 must hold 16 row-major values, got " +
                             std::to_string(h0_values.size()));
        }
        const Mat4 m = matrix_from_flat(h0_values);
        try {
            pair.h0 = RigidTransform::from_matrix(m);
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("h0: ") + e.what());
        }

        const fs::path base = fs::path(path).parent_path();
        const auto resolve = [&base](const std::string& p) {
            const fs::path fp(p);
            return fp.is_absolute() ? fp.string() : (base / fp).string();
        };
        pair.source = load_cloud(resolve(doc.at("source_path").get<std::string>()));
        pair.model = load_cloud(resolve(doc.at("model_path").get<std::string>()));

        if (doc.contains("correspondences")) {
            auto corr = doc.at("correspondences").get<std::vector<int>>();
            if (corr.size() != pair.source.size()) {
                throw ParseError("correspondence count " + std::to_string(corr.size()) +
                                 " does not match source size " + std::to_string(pair.source.size()));
            }
            for (int idx : corr) {
                if (idx < 0 || idx >= static_cast<int>(pair.model.size())) {
                    throw ParseError("correspondence index " + std::to_string(idx) +
                                     " outside model");
                }
            }
            pair.correspondences = std::move(corr);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("pair manifest: ") + e.what());
    }
    return pair;
}

void save_pair(const RegistrationPair& pair, const std::string& path) {
    const fs::path manifest(path);
    const fs::path base = manifest.parent_path();
    const std::string stem = manifest.stem().string();
    const std::string source_name = stem + "_source.xyz";
    const std::string model_name = stem + "_model.xyz";

    save_cloud(pair.source, (base / source_name).string());
    save_cloud(pair.model, (base / model_name).string());

    json doc;
    doc["id"] = pair.id;
    doc["source_path"] = source_name;
    doc["model_path"] = model_name;
    std::vector<double> h0_values;
    h0_values.reserve(16);
    const Mat4 m = pair.h0.matrix();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            h0_values.push_back(m(r, c));
        }
    }
    doc["h0"] = h0_values;
    if (pair.correspondences) {
        doc["correspondences"] = *pair.correspondences;
    }

    std::ofstream out(path);
    if (!out) {
        throw MissingFile("cannot open '" + path + "' for writing");
    }
    out << doc.dump(2) << "\n";
}

}  // namespace se3diffreg
