#include "actrec/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "actrec/rng.hpp"

namespace actrec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double smoothstep(double s) {
    s = std::clamp(s, 0.0, 1.0);
    return s * s * (3.0 - 2.0 * s);
}

// Body proportions as fractions of actor height.
struct ActorDims {
    double A;          // actor height in pixels
    double head_r;     // head radius
    double neck_y;     // offsets below actor top
    double shoulder_y;
    double hip_y;
    double torso_hw;   // torso half width
    double hip_off;    // lateral hip/foot offset
    double arm_len;
    double arm_th;
    double leg_len;
    double leg_th;
    double obj_r;

    explicit ActorDims(double actor_height) : A(actor_height) {
        head_r = 0.09 * A;
        neck_y = 0.18 * A;
        shoulder_y = 0.22 * A;
        hip_y = 0.55 * A;
        torso_hw = 0.13 * A;
        hip_off = 0.06 * A;
        arm_len = 0.33 * A;
        arm_th = 0.045 * A;
        leg_len = 0.45 * A;
        leg_th = 0.055 * A;
        obj_r = 0.07 * A;
    }
};

// One frame's articulation. Feet and shoulders are absolute positions so
// the sit program can plant the feet while the upper body translates.
struct Pose {
    double root_x = 0.0;    // upper-body center x
    double upper_dy = 0.0;  // upper-body vertical drop (sit)
    double leg_angle[2] = {0.0, 0.0};  // from vertical, + toward facing dir
    double arm_angle[2] = {0.0, 0.0};
    bool feet_planted = false;  // legs drawn hip->standing foot position
    bool carry_object = false;
    int front_arm = 0;
};

struct Canvas {
    int w, h;
    std::vector<std::uint8_t>* pixels;
    std::vector<std::uint8_t> mask;  // 1 where an actor pixel was rendered

    Canvas(int width, int height, std::vector<std::uint8_t>* px)
        : w(width), h(height), pixels(px), mask(static_cast<std::size_t>(width) * height, 0) {}

    void put(int x, int y, std::uint8_t v) {
        if (x < 0 || x >= w || y < 0 || y >= h) return;
        (*pixels)[static_cast<std::size_t>(y) * w + x] = v;
        mask[static_cast<std::size_t>(y) * w + x] = 1;
    }
};

void fill_disc(Canvas& c, double cx, double cy, double r, std::uint8_t v) {
    const int x0 = static_cast<int>(std::ceil(cx - r));
    const int x1 = static_cast<int>(std::floor(cx + r));
    const int y0 = static_cast<int>(std::ceil(cy - r));
    const int y1 = static_cast<int>(std::floor(cy + r));
    const double r2 = r * r;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= r2) c.put(x, y, v);
        }
}

void fill_rect(Canvas& c, double x0, double y0, double x1, double y1, std::uint8_t v) {
    const int ix0 = static_cast<int>(std::ceil(x0));
    const int ix1 = static_cast<int>(std::floor(x1));
    const int iy0 = static_cast<int>(std::ceil(y0));
    const int iy1 = static_cast<int>(std::floor(y1));
    for (int y = iy0; y <= iy1; ++y)
        for (int x = ix0; x <= ix1; ++x) c.put(x, y, v);
}

void fill_capsule(Canvas& c, double ax, double ay, double bx, double by, double thickness,
                  std::uint8_t v) {
    const double r = 0.5 * thickness;
    const double x0 = std::min(ax, bx) - r, x1 = std::max(ax, bx) + r;
    const double y0 = std::min(ay, by) - r, y1 = std::max(ay, by) + r;
    const double ux = bx - ax, uy = by - ay;
    const double len2 = ux * ux + uy * uy;
    const double r2 = r * r;
    for (int y = static_cast<int>(std::ceil(y0)); y <= static_cast<int>(std::floor(y1)); ++y)
        for (int x = static_cast<int>(std::ceil(x0)); x <= static_cast<int>(std::floor(x1)); ++x) {
            double t = 0.0;
            if (len2 > 0.0) t = std::clamp(((x - ax) * ux + (y - ay) * uy) / len2, 0.0, 1.0);
            const double dx = x - (ax + t * ux), dy = y - (ay + t * uy);
            if (dx * dx + dy * dy <= r2) c.put(x, y, v);
        }
}

struct SceneLayout {
    ActorDims dims;
    double y_floor;
    double y_top;     // actor top when standing
    double x0;        // start root x
    int dir;          // facing direction, +1 right
    double walk_phase;
    double walk_speed;
    double bounce_lo, bounce_hi;

    SceneLayout(const SceneConfig& cfg) : dims(cfg.actor_scale * cfg.height) {
        y_floor = cfg.height - 1 - std::max(1.0, std::round(0.02 * cfg.height));
        y_top = y_floor - dims.A;
        const double start_margin = 0.55 * dims.A;
        const double bounce_margin = 0.35 * dims.A;
        std::uint64_t s = mix_seed(cfg.seed, 0x5CE11EULL);
        Rng rng(s);
        x0 = start_margin + rng.next_double() * std::max(0.0, cfg.width - 2.0 * start_margin);
        dir = rng.next_double() < 0.5 ? -1 : 1;
        walk_phase = rng.next_double() * kTwoPi;
        walk_speed = std::max(1.5, 0.0125 * cfg.width);
        bounce_lo = bounce_margin;
        bounce_hi = cfg.width - bounce_margin;
        if (bounce_hi < bounce_lo) bounce_hi = bounce_lo;
    }
};

// Triangle-wave reflection of x0 + dir*speed*t inside [lo, hi].
double bounce(double x0, double v, double lo, double hi, int t) {
    const double span = hi - lo;
    if (span <= 0.0) return lo;
    double z = std::fmod(x0 - lo + v * t, 2.0 * span);
    if (z < 0.0) z += 2.0 * span;
    return lo + (z <= span ? z : 2.0 * span - z);
}

// Half-open action interval per class; Walk covers the whole sequence and
// NeutralStand has none.
std::pair<int, int> action_interval(ActivityClass activity, int n_frames) {
    switch (activity) {
        case ActivityClass::Walk:
            return {0, n_frames};
        case ActivityClass::Sit:
            return {static_cast<int>(std::lround(0.15 * n_frames)),
                    static_cast<int>(std::lround(0.70 * n_frames))};
        case ActivityClass::Lift:
        case ActivityClass::PutDown:
            return {static_cast<int>(std::lround(0.10 * n_frames)),
                    static_cast<int>(std::lround(0.80 * n_frames))};
        case ActivityClass::NeutralStand:
            return {0, 0};
    }
    return {0, 0};
}

double interval_progress(int t, std::pair<int, int> iv) {
    if (iv.second <= iv.first) return 0.0;
    if (t < iv.first) return 0.0;
    if (t >= iv.second) return 1.0;
    return static_cast<double>(t - iv.first) / (iv.second - iv.first);
}

Pose pose_at(const SceneConfig& cfg, const SceneLayout& lay, int t) {
    Pose p;
    p.root_x = lay.x0;
    p.front_arm = lay.dir > 0 ? 1 : 0;
    const int n = cfg.n_frames;
    switch (cfg.activity) {
        case ActivityClass::NeutralStand:
            break;
        case ActivityClass::Walk: {
            p.root_x = bounce(lay.x0, lay.dir * lay.walk_speed, lay.bounce_lo, lay.bounce_hi, t);
            const double period = std::max(6.0, 0.5 * cfg.fps);
            const double sw = 0.5 * std::sin(kTwoPi * t / period + lay.walk_phase);
            p.leg_angle[0] = sw;
            p.leg_angle[1] = -sw;
            p.arm_angle[0] = -0.6 * sw;
            p.arm_angle[1] = 0.6 * sw;
            break;
        }
        case ActivityClass::Sit: {
            const double s = smoothstep(interval_progress(t, action_interval(cfg.activity, n)));
            p.root_x = lay.x0 + 0.30 * lay.dims.leg_len * s * lay.dir;
            p.upper_dy = 0.55 * lay.dims.leg_len * s;
            p.feet_planted = true;
            break;
        }
        case ActivityClass::Lift: {
            const double s = smoothstep(interval_progress(t, action_interval(cfg.activity, n)));
            p.arm_angle[p.front_arm] = 0.5 * M_PI * s;
            p.carry_object = true;
            break;
        }
        case ActivityClass::PutDown: {
            SceneConfig lifted = cfg;
            lifted.activity = ActivityClass::Lift;
            return pose_at(lifted, lay, n - 1 - t);
        }
    }
    return p;
}

constexpr std::uint8_t kHeadVal = 210;
constexpr std::uint8_t kTorsoVal = 200;
constexpr std::uint8_t kArmVal = 185;
constexpr std::uint8_t kLegVal = 190;
constexpr std::uint8_t kObjectVal = 235;

BoundingBox render_pose(const SceneConfig& cfg, const SceneLayout& lay, const Pose& p,
                        std::vector<std::uint8_t>& frame) {
    const ActorDims& d = lay.dims;
    Canvas canvas(cfg.width, cfg.height, &frame);

    const double top = lay.y_top + p.upper_dy;
    const double hip_y = top + d.hip_y;
    const double sh_y = top + d.shoulder_y;
    const double hip_x[2] = {p.root_x - d.hip_off, p.root_x + d.hip_off};
    const double sh_x[2] = {p.root_x - d.torso_hw, p.root_x + d.torso_hw};

    for (int i = 0; i < 2; ++i) {
        double fx, fy;
        if (p.feet_planted) {
            fx = lay.x0 + (i == 0 ? -d.hip_off : d.hip_off);
            fy = lay.y_floor;
        } else {
            fx = hip_x[i] + d.leg_len * std::sin(p.leg_angle[i]) * lay.dir;
            fy = hip_y + d.leg_len * std::cos(p.leg_angle[i]);
        }
        fill_capsule(canvas, hip_x[i], hip_y, fx, fy, d.leg_th, kLegVal);
    }

    fill_rect(canvas, p.root_x - d.torso_hw, top + d.neck_y, p.root_x + d.torso_hw, hip_y,
              kTorsoVal);
    fill_disc(canvas, p.root_x, top + d.head_r, d.head_r, kHeadVal);

    for (int i = 0; i < 2; ++i) {
        const double tip_x = sh_x[i] + d.arm_len * std::sin(p.arm_angle[i]) * lay.dir;
        const double tip_y = sh_y + d.arm_len * std::cos(p.arm_angle[i]);
        fill_capsule(canvas, sh_x[i], sh_y, tip_x, tip_y, d.arm_th, kArmVal);
        if (p.carry_object && i == p.front_arm)
            fill_disc(canvas, tip_x + d.obj_r * lay.dir * std::sin(p.arm_angle[i]),
                      tip_y + d.obj_r * std::cos(p.arm_angle[i]), d.obj_r, kObjectVal);
    }

    BoundingBox box{cfg.width, cfg.height, -1, -1};
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x)
            if (canvas.mask[static_cast<std::size_t>(y) * cfg.width + x]) {
                box.x_min = std::min(box.x_min, x);
                box.y_min = std::min(box.y_min, y);
                box.x_max = std::max(box.x_max, x);
                box.y_max = std::max(box.y_max, y);
            }
    if (box.x_max < 0) box = BoundingBox{0, 0, 0, 0};  // fully clipped actor
    return box;
}

}  // namespace

void SceneConfig::validate() const {
    if (width < 32 || height < 32) throw InvalidConfig("frame must be at least 32x32");
    if (n_frames < 2) throw InvalidConfig("need at least 2 frames");
    if (fps < 1) throw InvalidConfig("fps must be positive");
    if (!(actor_scale >= 0.2 && actor_scale <= 0.9))
        throw InvalidConfig("actor_scale outside [0.2, 0.9]");
    if (actor_scale * height > height) throw InvalidConfig("actor taller than frame");
    if (background_level < 0 || background_level > 255)
        throw InvalidConfig("background_level outside [0, 255]");
}

SceneConfig paper_scale(SceneConfig config) {
    config.width = 640;
    config.height = 480;
    return config;
}

void NoiseConfig::validate() const {
    if (!(pixel_sigma >= 0.0) || !std::isfinite(pixel_sigma))
        throw InvalidConfig("pixel_sigma must be finite and >= 0");
    if (!(illum_gradient >= 0.0) || !std::isfinite(illum_gradient))
        throw InvalidConfig("illum_gradient must be finite and >= 0");
    if (distractor_count < 0) throw InvalidConfig("distractor_count must be >= 0");
    if (!(distractor_speed >= 0.0) || !std::isfinite(distractor_speed))
        throw InvalidConfig("distractor_speed must be finite and >= 0");
}

void validate_frames(const FrameSequence& frames) {
    if (frames.width < 1 || frames.height < 1) throw InvalidConfig("empty frame dimensions");
    if (frames.n_frames() < 2) throw TooFewFrames("frame differencing needs at least 2 frames");
    const std::size_t expected =
        static_cast<std::size_t>(frames.width) * static_cast<std::size_t>(frames.height);
    for (const auto& f : frames.frames)
        if (f.size() != expected) throw DimensionMismatch("frame sample count mismatch");
}

double walk_root_x(const SceneConfig& config, int t) {
    SceneLayout lay(config);
    return bounce(lay.x0, lay.dir * lay.walk_speed, lay.bounce_lo, lay.bounce_hi, t);
}

std::pair<FrameSequence, GroundTruth> synth_sequence(const SceneConfig& config) {
    config.validate();
    SceneLayout lay(config);

    FrameSequence seq;
    seq.width = config.width;
    seq.height = config.height;
    seq.frames.assign(static_cast<std::size_t>(config.n_frames),
                      std::vector<std::uint8_t>(
                          static_cast<std::size_t>(config.width) * config.height,
                          static_cast<std::uint8_t>(config.background_level)));

    GroundTruth gt;
    gt.activity = config.activity;
    auto iv = action_interval(config.activity, config.n_frames);
    if (iv.second > iv.first) gt.event_intervals.push_back(iv);
    gt.actor_track.reserve(static_cast<std::size_t>(config.n_frames));

    for (int t = 0; t < config.n_frames; ++t) {
        const Pose p = pose_at(config, lay, t);
        gt.actor_track.push_back(render_pose(config, lay, p, seq.frames[static_cast<std::size_t>(t)]));
    }
    return {std::move(seq), std::move(gt)};
}

FrameSequence add_noise(const FrameSequence& frames, const NoiseConfig& noise) {
    validate_frames(frames);
    noise.validate();

    struct Distractor {
        double x0, y0, vx, vy, radius;
        std::uint8_t value;
    };
    std::vector<Distractor> distractors;
    distractors.reserve(static_cast<std::size_t>(noise.distractor_count));
    for (int d = 0; d < noise.distractor_count; ++d) {
        Rng rng(mix_seed(noise.seed, 0xD157ULL, static_cast<std::uint64_t>(d)));
        Distractor blob;
        blob.x0 = rng.next_double() * frames.width;
        blob.y0 = rng.next_double() * frames.height;
        const double angle = rng.next_double() * kTwoPi;
        blob.vx = noise.distractor_speed * std::cos(angle);
        blob.vy = noise.distractor_speed * std::sin(angle);
        blob.radius = rng.uniform(1.5, 2.5);
        blob.value = static_cast<std::uint8_t>(90 + rng.next_below(140));
        distractors.push_back(blob);
    }

    FrameSequence out = frames;
    const int w = frames.width, h = frames.height;
    for (int t = 0; t < frames.n_frames(); ++t) {
        auto& frame = out.frames[static_cast<std::size_t>(t)];
        Canvas canvas(w, h, &frame);
        for (const auto& blob : distractors) {
            double cx = std::fmod(blob.x0 + blob.vx * t, static_cast<double>(w));
            double cy = std::fmod(blob.y0 + blob.vy * t, static_cast<double>(h));
            if (cx < 0.0) cx += w;
            if (cy < 0.0) cy += h;
            fill_disc(canvas, cx, cy, blob.radius, blob.value);
        }
        if (noise.pixel_sigma > 0.0 || noise.illum_gradient > 0.0) {
            Rng rng(mix_seed(noise.seed, 0x4015EULL, static_cast<std::uint64_t>(t)));
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    double v = frame[i];
                    if (noise.illum_gradient > 0.0 && w > 1)
                        v += noise.illum_gradient * x / (w - 1);
                    if (noise.pixel_sigma > 0.0) v += noise.pixel_sigma * rng.next_gaussian();
                    frame[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
                }
        }
    }
    return out;
}

namespace {

void put_u32le(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_fgy1(const std::string& path, const FrameSequence& frames) {
    validate_frames(frames);
    std::string header = "FGY1";
    put_u32le(header, static_cast<std::uint32_t>(frames.width));
    put_u32le(header, static_cast<std::uint32_t>(frames.height));
    put_u32le(header, static_cast<std::uint32_t>(frames.n_frames()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& f : frames.frames)
        out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size()));
    if (!out) throw IoError("write failed: " + path);
}

FrameSequence read_fgy1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    unsigned char header[16];
    in.read(reinterpret_cast<char*>(header), 16);
    if (!in || std::string(reinterpret_cast<char*>(header), 4) != "FGY1")
        throw IoError("not an FGY1 container: " + path);

    FrameSequence seq;
    seq.width = static_cast<int>(get_u32le(header + 4));
    seq.height = static_cast<int>(get_u32le(header + 8));
    const std::uint32_t n = get_u32le(header + 12);
    if (seq.width < 1 || seq.height < 1 || n < 2 || seq.width > 1 << 16 || seq.height > 1 << 16)
        throw IoError("bad FGY1 header: " + path);

    const std::size_t frame_size = static_cast<std::size_t>(seq.width) * seq.height;
    seq.frames.assign(n, std::vector<std::uint8_t>(frame_size));
    for (auto& f : seq.frames) {
        in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(frame_size));
        if (!in) throw IoError("truncated FGY1 container: " + path);
    }
    if (in.get() != std::ifstream::traits_type::eof())
        throw IoError("trailing bytes in FGY1 container: " + path);
    return seq;
}

}  // namespace actrec
