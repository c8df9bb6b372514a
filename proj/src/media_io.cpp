#include "stab/media_io.hpp"

#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace stab {

namespace {

inline std::uint8_t clamp_u8(long v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

std::string temp_name(const std::string& path) {
    static std::atomic<unsigned> counter{0};
    return path + ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter++);
}

void format_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

// ---- natural (lexicographic-numeric) filename ordering ----

bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t ia = i, jb = j;
            while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
            while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
            const std::string na = a.substr(i, ia - i);
            const std::string nb = b.substr(j, jb - j);
            // Compare by numeric value: strip leading zeros, then by length, then digits.
            const std::string ta = na.substr(std::min(na.find_first_not_of('0'), na.size() - 1));
            const std::string tb = nb.substr(std::min(nb.find_first_not_of('0'), nb.size() - 1));
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            if (ta != tb) return ta < tb;
            i = ia;
            j = jb;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() < b.size();
}

// ---- YUV <-> RGB (BT.601 full range) ----

struct Rgb {
    std::uint8_t r, g, b;
};

Rgb yuv_to_rgb(std::uint8_t y, std::uint8_t cb, std::uint8_t cr) {
    const double du = cb - 128.0;
    const double dv = cr - 128.0;
    return {clamp_u8(std::lround(y + 1.402 * dv)),
            clamp_u8(std::lround(y - 0.344136 * du - 0.714136 * dv)),
            clamp_u8(std::lround(y + 1.772 * du))};
}

std::uint8_t chroma_cb(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return clamp_u8(std::lround(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b));
}

std::uint8_t chroma_cr(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return clamp_u8(std::lround(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b));
}

// ---- Y4M ----

struct Y4mHeader {
    int width = 0;
    int height = 0;
    int fps_num = 25;
    int fps_den = 1;
    std::string colorspace = "420jpeg";
};

Y4mHeader parse_y4m_header(const std::string& line) {
    std::istringstream in(line);
    std::string magic;
    in >> magic;
    if (magic != "YUV4MPEG2") {
        throw IoError("malformed Y4M header: missing YUV4MPEG2 magic");
    }
    Y4mHeader h;
    std::string token;
    while (in >> token) {
        if (token.empty()) continue;
        const char tag = token[0];
        const std::string val = token.substr(1);
        switch (tag) {
            case 'W': h.width = std::atoi(val.c_str()); break;
            case 'H': h.height = std::atoi(val.c_str()); break;
            case 'F': {
                const auto colon = val.find(':');
                if (colon == std::string::npos) throw IoError("malformed Y4M frame rate");
                h.fps_num = std::atoi(val.substr(0, colon).c_str());
                h.fps_den = std::atoi(val.substr(colon + 1).c_str());
                break;
            }
            case 'C': h.colorspace = val; break;
            default: break;  // I, A, X tokens ignored
        }
    }
    if (h.width <= 0 || h.height <= 0) {
        throw IoError("malformed Y4M header: missing W or H");
    }
    return h;
}

struct PlaneGeometry {
    int cw = 0;
    int ch = 0;  // zero for mono
};

PlaneGeometry chroma_geometry(const std::string& colorspace, int w, int h) {
    if (colorspace == "mono") return {0, 0};
    if (colorspace.rfind("420", 0) == 0) return {(w + 1) / 2, (h + 1) / 2};
    if (colorspace.rfind("422", 0) == 0) return {(w + 1) / 2, h};
    if (colorspace.rfind("444", 0) == 0) return {w, h};
    throw IoError("unsupported Y4M colorspace C" + colorspace);
}

class Y4mSource : public FrameSource {
  public:
    explicit Y4mSource(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) {
            throw IoError("cannot open " + path);
        }
        std::string line;
        if (!std::getline(in_, line)) {
            throw IoError("malformed Y4M header: empty file " + path);
        }
        header_ = parse_y4m_header(line);
        geometry_ = chroma_geometry(header_.colorspace, header_.width, header_.height);
    }

    const Y4mHeader& header() const { return header_; }

    std::optional<VideoFrame> next() override {
        std::string line;
        if (!std::getline(in_, line)) {
            return std::nullopt;  // clean EOF
        }
        if (line.rfind("FRAME", 0) != 0) {
            throw IoError("malformed Y4M frame marker in " + path_);
        }
        VideoFrame f;
        f.luma = GrayFrame(header_.width, header_.height, index_++);
        read_plane(f.luma.pixels);
        if (geometry_.cw > 0) {
            f.chroma_width = geometry_.cw;
            f.chroma_height = geometry_.ch;
            f.cb.resize(static_cast<std::size_t>(geometry_.cw) * geometry_.ch);
            f.cr.resize(f.cb.size());
            read_plane(f.cb);
            read_plane(f.cr);
        }
        return f;
    }

  private:
    std::string path_;
    std::ifstream in_;
    Y4mHeader header_;
    PlaneGeometry geometry_;
    std::int64_t index_ = 0;

    void read_plane(std::vector<std::uint8_t>& plane) {
        in_.read(reinterpret_cast<char*>(plane.data()), static_cast<std::streamsize>(plane.size()));
        if (static_cast<std::size_t>(in_.gcount()) != plane.size()) {
            throw IoError("truncated Y4M frame in " + path_);
        }
    }
};

class Y4mSink : public FrameSink {
  public:
    explicit Y4mSink(const StreamSpec& spec) : spec_(spec), tmp_(temp_name(spec.path)) {}

    ~Y4mSink() override { discard(); }

    void push(VideoFrame frame) override {
        if (!out_.is_open()) {
            out_.open(tmp_, std::ios::binary);
            if (!out_) {
                throw IoError("cannot write " + spec_.path);
            }
            width_ = frame.luma.width;
            height_ = frame.luma.height;
            if (!frame.has_chroma()) {
                colorspace_ = "mono";
            } else if (frame.chroma_width == width_ && frame.chroma_height == height_) {
                colorspace_ = "444";
            } else if (frame.chroma_height == height_) {
                colorspace_ = "422";
            } else {
                colorspace_ = "420jpeg";
            }
            out_ << "YUV4MPEG2 W" << width_ << " H" << height_ << " F" << spec_.fps_num << ":"
                 << spec_.fps_den << " Ip A1:1 C" << colorspace_ << "\n";
        }
        if (frame.luma.width != width_ || frame.luma.height != height_) {
            throw IoError("frame dimensions changed mid-stream");
        }
        out_ << "FRAME\n";
        write_plane(frame.luma.pixels);
        if (frame.has_chroma()) {
            write_plane(frame.cb);
            write_plane(frame.cr);
        }
        ++frames_;
    }

    void close() override {
        if (closed_) return;
        if (frames_ == 0) {
            discard();
            throw IoError("refusing to write an empty stream to " + spec_.path);
        }
        out_.flush();
        if (!out_) {
            discard();
            throw IoError("write failure on " + spec_.path);
        }
        out_.close();
        fs::rename(tmp_, spec_.path);
        closed_ = true;
    }

    void abort(const std::string&) override { discard(); }

  private:
    StreamSpec spec_;
    std::string tmp_;
    std::ofstream out_;
    int width_ = 0;
    int height_ = 0;
    std::string colorspace_;
    std::int64_t frames_ = 0;
    bool closed_ = false;

    void write_plane(const std::vector<std::uint8_t>& plane) {
        out_.write(reinterpret_cast<const char*>(plane.data()),
                   static_cast<std::streamsize>(plane.size()));
    }

    void discard() {
        if (closed_) return;
        if (out_.is_open()) out_.close();
        std::error_code ec;
        fs::remove(tmp_, ec);
    }
};

// ---- PGM / PPM ----

int next_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comments, then reads one unsigned integer.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) {
        throw IoError("malformed PNM header");
    }
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

VideoFrame read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || (m1 != '5' && m1 != '6')) {
        throw IoError("unsupported PNM magic in " + path);
    }
    const bool color = m1 == '6';
    const int w = next_pnm_token(in);
    const int h = next_pnm_token(in);
    const int maxval = next_pnm_token(in);
    if (maxval <= 0 || maxval > 255) {
        throw IoError("unsupported PNM maxval in " + path);
    }
    // The single whitespace after maxval was consumed by the token reader.
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> raw(n * (color ? 3 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw IoError("truncated PNM raster in " + path);
    }
    VideoFrame f;
    f.luma = GrayFrame(w, h);
    if (!color) {
        f.luma.pixels = std::move(raw);
        return f;
    }
    f.chroma_width = w;
    f.chroma_height = h;
    f.cb.resize(n);
    f.cr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t r = raw[3 * i], g = raw[3 * i + 1], b = raw[3 * i + 2];
        f.luma.pixels[i] = luma_bt601(r, g, b);
        f.cb[i] = chroma_cb(r, g, b);
        f.cr[i] = chroma_cr(r, g, b);
    }
    return f;
}

void write_pnm(const std::string& path, const VideoFrame& f, bool color) {
    const std::string tmp = temp_name(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + path);
        }
        const int w = f.luma.width;
        const int h = f.luma.height;
        if (!color) {
            out << "P5\n" << w << " " << h << "\n255\n";
            out.write(reinterpret_cast<const char*>(f.luma.pixels.data()),
                      static_cast<std::streamsize>(f.luma.pixels.size()));
        } else {
            out << "P6\n" << w << " " << h << "\n255\n";
            std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 3);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    const Rgb rgb = f.has_chroma() ? yuv_to_rgb(f.luma.pixels[i], f.cb[i], f.cr[i])
                                                   : Rgb{f.luma.pixels[i], f.luma.pixels[i],
                                                         f.luma.pixels[i]};
                    row[3 * x] = rgb.r;
                    row[3 * x + 1] = rgb.g;
                    row[3 * x + 2] = rgb.b;
                }
                out.write(reinterpret_cast<const char*>(row.data()),
                          static_cast<std::streamsize>(row.size()));
            }
        }
        if (!out) {
            throw IoError("write failure on " + path);
        }
    }
    fs::rename(tmp, path);
}

// ---- PNG (libpng simplified API) ----

VideoFrame read_png(const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw IoError("cannot read PNG " + path);
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("cannot decode PNG " + path);
    }
    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    VideoFrame f;
    f.luma = GrayFrame(w, h);
    f.chroma_width = w;
    f.chroma_height = h;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    f.cb.resize(n);
    f.cr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t r = raw[3 * i], g = raw[3 * i + 1], b = raw[3 * i + 2];
        f.luma.pixels[i] = luma_bt601(r, g, b);
        f.cb[i] = chroma_cb(r, g, b);
        f.cr[i] = chroma_cr(r, g, b);
    }
    return f;
}

void write_png(const std::string& path, const VideoFrame& f) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(f.luma.width);
    image.height = static_cast<png_uint_32>(f.luma.height);

    const std::string tmp = temp_name(path);
    int ok = 0;
    if (!f.has_chroma()) {
        image.format = PNG_FORMAT_GRAY;
        ok = png_image_write_to_file(&image, tmp.c_str(), 0, f.luma.pixels.data(), 0, nullptr);
    } else {
        image.format = PNG_FORMAT_RGB;
        std::vector<std::uint8_t> raw(static_cast<std::size_t>(f.luma.width) * f.luma.height * 3);
        for (std::size_t i = 0; i < f.luma.pixels.size(); ++i) {
            const Rgb rgb = yuv_to_rgb(f.luma.pixels[i], f.cb[i], f.cr[i]);
            raw[3 * i] = rgb.r;
            raw[3 * i + 1] = rgb.g;
            raw[3 * i + 2] = rgb.b;
        }
        ok = png_image_write_to_file(&image, tmp.c_str(), 0, raw.data(), 0, nullptr);
    }
    if (!ok) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw IoError("cannot write PNG " + path);
    }
    fs::rename(tmp, path);
}

// ---- image sequence directories ----

bool has_extension(const fs::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e == ext;
}

class ImageDirSource : public FrameSource {
  public:
    explicit ImageDirSource(const std::string& dir) {
        if (!fs::is_directory(dir)) {
            throw IoError("not a directory: " + dir);
        }
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const fs::path& p = entry.path();
            if (has_extension(p, ".pgm") || has_extension(p, ".ppm") || has_extension(p, ".png")) {
                files_.push_back(p.string());
            }
        }
        std::sort(files_.begin(), files_.end(), [](const std::string& a, const std::string& b) {
            return natural_less(fs::path(a).filename().string(), fs::path(b).filename().string());
        });
        if (files_.empty()) {
            throw IoError("no frames found in " + dir);
        }
    }

    std::optional<VideoFrame> next() override {
        if (pos_ >= files_.size()) {
            return std::nullopt;
        }
        const std::string& file = files_[pos_];
        VideoFrame f = has_extension(file, ".png") ? read_png(file) : read_pnm(file);
        f.luma.index = static_cast<std::int64_t>(pos_);
        ++pos_;
        if (width_ == 0) {
            width_ = f.luma.width;
            height_ = f.luma.height;
        } else if (f.luma.width != width_ || f.luma.height != height_) {
            throw IoError("dimension mismatch mid-stream at " + file);
        }
        return f;
    }

  private:
    std::vector<std::string> files_;
    std::size_t pos_ = 0;
    int width_ = 0;
    int height_ = 0;
};

class ImageDirSink : public FrameSink {
  public:
    explicit ImageDirSink(const StreamSpec& spec) : spec_(spec) {
        fs::create_directories(spec_.path);
    }

    void push(VideoFrame frame) override {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06lld.%s",
                      static_cast<long long>(frames_), spec_.image_format.c_str());
        const std::string path = (fs::path(spec_.path) / name).string();
        if (spec_.image_format == "png") {
            write_png(path, frame);
        } else if (spec_.image_format == "ppm") {
            write_pnm(path, frame, true);
        } else {
            write_pnm(path, frame, false);
        }
        written_.push_back(path);
        ++frames_;
    }

    void close() override {
        if (frames_ == 0) {
            throw IoError("refusing to write an empty stream to " + spec_.path);
        }
    }

    void abort(const std::string&) override {
        for (const std::string& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        written_.clear();
    }

  private:
    StreamSpec spec_;
    std::int64_t frames_ = 0;
    std::vector<std::string> written_;
};

class ThrottledSource : public FrameSource {
  public:
    ThrottledSource(std::unique_ptr<FrameSource> inner, double fps)
        : inner_(std::move(inner)), interval_(1.0 / fps) {}

    std::optional<VideoFrame> next() override {
        const auto now = std::chrono::steady_clock::now();
        if (next_due_.time_since_epoch().count() != 0 && now < next_due_) {
            std::this_thread::sleep_until(next_due_);
        }
        next_due_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(interval_));
        return inner_->next();
    }

  private:
    std::unique_ptr<FrameSource> inner_;
    double interval_;
    std::chrono::steady_clock::time_point next_due_{};
};

}  // namespace

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

StreamSpec infer_stream_spec(const std::string& path) {
    StreamSpec spec;
    spec.path = path;
    std::string lower = path;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    spec.kind = lower.size() >= 4 && lower.ends_with(".y4m") ? StreamSpec::Kind::Y4m
                                                             : StreamSpec::Kind::ImageDir;
    return spec;
}

StreamSpec probe_stream_spec(const std::string& path) {
    StreamSpec spec = infer_stream_spec(path);
    if (spec.kind == StreamSpec::Kind::Y4m) {
        Y4mSource probe(path);
        spec.fps_num = probe.header().fps_num;
        spec.fps_den = probe.header().fps_den;
    }
    return spec;
}

std::unique_ptr<FrameSource> open_source(const StreamSpec& spec) {
    if (spec.kind == StreamSpec::Kind::Y4m) {
        return std::make_unique<Y4mSource>(spec.path);
    }
    return std::make_unique<ImageDirSource>(spec.path);
}

std::unique_ptr<FrameSink> open_sink(const StreamSpec& spec) {
    if (spec.kind == StreamSpec::Kind::Y4m) {
        return std::make_unique<Y4mSink>(spec);
    }
    return std::make_unique<ImageDirSink>(spec);
}

std::unique_ptr<FrameSource> throttle_source(std::unique_ptr<FrameSource> inner, double fps) {
    if (!(fps > 0.0)) {
        throw InvalidConfigError("throttle fps must be positive");
    }
    return std::make_unique<ThrottledSource>(std::move(inner), fps);
}

std::vector<VideoFrame> read_all(FrameSource& source) {
    std::vector<VideoFrame> frames;
    while (std::optional<VideoFrame> f = source.next()) {
        frames.push_back(std::move(*f));
    }
    return frames;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = temp_name(path);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + path);
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failure on " + path);
        }
    }
    fs::rename(tmp, path);
}

void export_trajectory(const Trajectory& traj, const SmoothConfig& cfg, const std::string& path) {
    if (traj.size() == 0) {
        throw InvalidInputError("cannot export an empty trajectory");
    }
    std::string out =
        "frame,dx,dy,da,dls,cum_x,cum_y,cum_a,cum_ls,smooth_x,smooth_y,smooth_a,smooth_ls\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += std::to_string(i);
        const DeltaParams& d = traj.delta(i);
        const Params4& c = traj.cumulative(i);
        for (double v : {d.dx, d.dy, d.da, d.dls, c.x, c.y, c.a, c.ls}) {
            out += ',';
            format_double(out, v);
        }
        const std::optional<Params4> s = traj.smooth_at(i, cfg);
        if (s) {
            for (double v : {s->x, s->y, s->a, s->ls}) {
                out += ',';
                format_double(out, v);
            }
        } else {
            out += ",,,,";
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

namespace {

std::vector<DeltaParams> read_delta_csv(const std::string& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind(expected_header, 0) != 0) {
        throw IoError("unexpected CSV header in " + path);
    }
    std::vector<DeltaParams> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() < 5) {
            throw IoError("short CSV row in " + path);
        }
        DeltaParams d;
        d.dx = std::strtod(cells[1].c_str(), nullptr);
        d.dy = std::strtod(cells[2].c_str(), nullptr);
        d.da = std::strtod(cells[3].c_str(), nullptr);
        d.dls = std::strtod(cells[4].c_str(), nullptr);
        d.kind = ModelKind::Similarity;
        out.push_back(d);
    }
    return out;
}

}  // namespace

std::vector<DeltaParams> read_trajectory_csv(const std::string& path) {
    return read_delta_csv(path, "frame,dx,dy,da,dls,");
}

void export_truth(const std::vector<DeltaParams>& truth, const std::string& path) {
    if (truth.empty()) {
        throw InvalidInputError("cannot export an empty truth trajectory");
    }
    std::string out =
        "frame,truth_dx,truth_dy,truth_da,truth_dls,truth_cum_x,truth_cum_y,truth_cum_a,"
        "truth_cum_ls\n";
    Params4 cum;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const DeltaParams& d = truth[i];
        cum.x += d.dx;
        cum.y += d.dy;
        cum.a += d.da;
        cum.ls += d.dls;
        out += std::to_string(i);
        for (double v : {d.dx, d.dy, d.da, d.dls, cum.x, cum.y, cum.a, cum.ls}) {
            out += ',';
            format_double(out, v);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<DeltaParams> read_truth_csv(const std::string& path) {
    return read_delta_csv(path, "frame,truth_dx,truth_dy,truth_da,truth_dls,");
}

}  // namespace stab
