#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tacsole/errors.hpp"
#include "tacsole/image.hpp"
#include "tacsole/jpeg_codec.hpp"
#include "tacsole/log.hpp"
#include "tacsole/pnm.hpp"

// Frame acquisition: replay directories of numbered raster files, or a
// live multipart/x-mixed-replace MJPEG stream over HTTP. Sources are
// single-consumer iterators; frames are immutable once yielded.

namespace tacsole {

class FrameSource {
public:
    virtual ~FrameSource() = default;
    // Next frame in arrival order; nullopt when the source is exhausted.
    virtual std::optional<TactileFrame> next() = 0;
};

// ---------------------------------------------------------------------------
// Replay: directory of files named frame_%06d.<ext>, sorted numerically.
// Timestamps are synthesized at the configured rate; with pace_realtime
// the iterator additionally sleeps to deliver at that rate.

struct ReplayConfig {
    double fps = 30.0;
    bool pace_realtime = false;
};

class ReplaySource final : public FrameSource {
public:
    ReplaySource(const std::string& directory, const ReplayConfig& config = ReplayConfig{})
        : config_(config)
    {
        namespace fs = std::filesystem;
        if (!fs::is_directory(directory))
            throw source_error("replay: not a directory: " + directory);
        std::vector<std::pair<long, std::string>> numbered;
        for (const auto& entry : fs::directory_iterator(directory)) {
            if (!entry.is_regular_file()) continue;
            std::string name = entry.path().filename().string();
            if (name.rfind("frame_", 0) != 0) continue;
            std::size_t dot = name.find('.');
            if (dot == std::string::npos || dot <= 6) continue;
            std::string digits = name.substr(6, dot - 6);
            if (digits.empty() ||
                digits.find_first_not_of("0123456789") != std::string::npos)
                continue;
            numbered.emplace_back(std::stol(digits), entry.path().string());
        }
        if (numbered.empty())
            throw source_error("replay: no frame_%06d files in " + directory);
        std::sort(numbered.begin(), numbered.end());
        for (auto& [num, path] : numbered) paths_.push_back(std::move(path));
    }

    std::size_t file_count() const { return paths_.size(); }

    std::optional<TactileFrame> next() override
    {
        while (cursor_ < paths_.size()) {
            const std::string& path = paths_[cursor_++];
            ImageRGB8 img;
            try {
                img = load_raster(path);
            } catch (const error& e) {
                log_warn("replay: skipping malformed frame " + path + " (" + e.what() + ")");
                continue;
            }
            if (config_.pace_realtime && yielded_ > 0)
                std::this_thread::sleep_for(
                    std::chrono::duration<double>(1.0 / config_.fps));
            TactileFrame frame;
            frame.pixels = std::move(img);
            frame.frame_index = yielded_;
            frame.timestamp = static_cast<double>(yielded_) / config_.fps;
            ++yielded_;
            return frame;
        }
        return std::nullopt;
    }

    static ImageRGB8 load_raster(const std::string& path)
    {
        auto ends_with = [&](const char* suffix) {
            std::string s(suffix);
            return path.size() >= s.size() &&
                   path.compare(path.size() - s.size(), s.size(), s) == 0;
        };
        if (ends_with(".ppm")) return read_p6(path);
        if (ends_with(".pgm")) {
            ImageGray8 g = read_p5(path);
            ImageRGB8 rgb(g.width, g.height);
            for (std::size_t i = 0; i < g.px.size(); ++i) {
                rgb.px[3 * i] = g.px[i];
                rgb.px[3 * i + 1] = g.px[i];
                rgb.px[3 * i + 2] = g.px[i];
            }
            return rgb;
        }
        if (ends_with(".jpg") || ends_with(".jpeg")) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw io_error("replay: cannot open " + path);
            std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                            std::istreambuf_iterator<char>());
            return decode_jpeg(bytes);
        }
        throw io_error("replay: unsupported raster format: " + path);
    }

private:
    ReplayConfig config_;
    std::vector<std::string> paths_;
    std::size_t cursor_ = 0;
    std::int64_t yielded_ = 0;
};

// ---------------------------------------------------------------------------
// Incremental multipart/x-mixed-replace parser. Fed raw bytes, emits
// complete part bodies. Kept free of any socket code so it can be tested
// against byte fixtures directly.

class MultipartStreamParser {
public:
    explicit MultipartStreamParser(const std::string& boundary) : marker_("--" + boundary) {}

    // Extract the boundary token from a Content-Type header value.
    static std::optional<std::string> boundary_from_content_type(const std::string& content_type)
    {
        std::size_t pos = content_type.find("boundary=");
        if (pos == std::string::npos) return std::nullopt;
        std::string b = content_type.substr(pos + 9);
        if (!b.empty() && b.front() == '"') {
            std::size_t end = b.find('"', 1);
            if (end == std::string::npos) return std::nullopt;
            return b.substr(1, end - 1);
        }
        std::size_t end = b.find_first_of("; \r\n");
        return end == std::string::npos ? b : b.substr(0, end);
    }

    std::vector<std::vector<std::uint8_t>> feed(const char* data, std::size_t len)
    {
        buffer_.insert(buffer_.end(), data, data + len);
        std::vector<std::vector<std::uint8_t>> parts;
        for (;;) {
            if (!in_part_) {
                std::size_t b = find(marker_, 0);
                if (b == npos) break;
                std::size_t header_start = b + marker_.size();
                std::size_t header_end = find("\r\n\r\n", header_start);
                std::size_t skip = 4;
                if (header_end == npos) {
                    header_end = find("\n\n", header_start);
                    skip = 2;
                }
                if (header_end == npos) break; // wait for the full header block
                body_start_ = header_end + skip;
                in_part_ = true;
            }
            std::size_t next = find(marker_, body_start_);
            if (next == npos) break; // body still incomplete
            std::size_t body_end = next;
            // Strip the CRLF that precedes the next boundary marker.
            if (body_end >= 2 && buffer_[body_end - 2] == '\r' && buffer_[body_end - 1] == '\n')
                body_end -= 2;
            else if (body_end >= 1 && buffer_[body_end - 1] == '\n')
                body_end -= 1;
            parts.emplace_back(buffer_.begin() + static_cast<std::ptrdiff_t>(body_start_),
                               buffer_.begin() + static_cast<std::ptrdiff_t>(body_end));
            buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(next));
            in_part_ = false;
        }
        // Keep the tail bounded while scanning for a boundary.
        if (!in_part_ && buffer_.size() > marker_.size() + 4096) {
            std::size_t keep = marker_.size() + 256;
            buffer_.erase(buffer_.begin(),
                          buffer_.begin() + static_cast<std::ptrdiff_t>(buffer_.size() - keep));
        }
        return parts;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t find(const std::string& needle, std::size_t from) const
    {
        if (buffer_.size() < needle.size()) return npos;
        for (std::size_t i = from; i + needle.size() <= buffer_.size(); ++i) {
            bool hit = true;
            for (std::size_t j = 0; j < needle.size(); ++j) {
                if (buffer_[i + j] != static_cast<std::uint8_t>(needle[j])) {
                    hit = false;
                    break;
                }
            }
            if (hit) return i;
        }
        return npos;
    }

    std::string marker_;
    std::vector<std::uint8_t> buffer_;
    bool in_part_ = false;
    std::size_t body_start_ = 0;
};

// ---------------------------------------------------------------------------
// Latest-wins frame buffer of depth 1: acquisition threads publish, the
// perception loop always takes the newest frame; stale frames are dropped.

class LatestFrameBuffer {
public:
    void publish(TactileFrame frame)
    {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            slot_ = std::move(frame);
            closed_ = false;
        }
        cv_.notify_one();
    }

    void close()
    {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    // Blocks for the next unseen frame; nullopt once closed and drained.
    std::optional<TactileFrame> take()
    {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return slot_.has_value() || closed_; });
        if (!slot_.has_value()) return std::nullopt;
        std::optional<TactileFrame> out = std::move(slot_);
        slot_.reset();
        return out;
    }

    std::optional<TactileFrame> try_take()
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (!slot_.has_value()) return std::nullopt;
        std::optional<TactileFrame> out = std::move(slot_);
        slot_.reset();
        return out;
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::optional<TactileFrame> slot_;
    bool closed_ = true;
};

// ---------------------------------------------------------------------------
// Live MJPEG ingestion over HTTP (one JPEG per multipart part). The GET
// runs on its own thread; decoded frames queue in arrival order and
// malformed parts are skipped with a warning.

struct MjpegUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

inline MjpegUrl parse_http_url(const std::string& url)
{
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) throw source_error("stream: only http:// URLs are supported");
    std::string rest = url.substr(scheme.size());
    MjpegUrl out;
    std::size_t slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        out.host = hostport;
    } else {
        out.host = hostport.substr(0, colon);
        out.port = std::stoi(hostport.substr(colon + 1));
    }
    if (out.host.empty()) throw source_error("stream: empty host in URL");
    return out;
}

class MjpegSource final : public FrameSource {
public:
    explicit MjpegSource(const std::string& url, double connect_timeout_s = 5.0);
    ~MjpegSource() override;

    std::optional<TactileFrame> next() override;
    void stop();

private:
    void push_frame(ImageRGB8 img);

    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Dispatch on the source descriptor: an http:// URL opens the live MJPEG
// client, anything else is treated as a replay directory.
inline std::unique_ptr<FrameSource> open_source(const std::string& spec,
                                                const ReplayConfig& replay = ReplayConfig{});

} // namespace tacsole

// Implementation of the HTTP-backed source. Kept in the same header
// (header-only build); requires cpp-httplib from vendor/.
#include <httplib.h>

namespace tacsole {

struct MjpegSource::Impl {
    httplib::Client client;
    std::thread worker;
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<TactileFrame> queue;
    std::atomic<bool> stopping{false};
    bool finished = false;
    bool headers_seen = false;
    std::string failure;
    std::int64_t next_index = 0;
    std::chrono::steady_clock::time_point epoch = std::chrono::steady_clock::now();

    explicit Impl(const MjpegUrl& url) : client(url.host, url.port) {}
};

inline MjpegSource::MjpegSource(const std::string& url, double connect_timeout_s)
{
    MjpegUrl parsed = parse_http_url(url);
    impl_ = std::make_unique<Impl>(parsed);
    impl_->client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(connect_timeout_s * 1000)));
    impl_->client.set_read_timeout(std::chrono::seconds(30));

    Impl* impl = impl_.get();
    std::string path = parsed.path;
    impl->worker = std::thread([impl, path] {
        std::unique_ptr<MultipartStreamParser> parser;
        auto result = impl->client.Get(
            path,
            [&](const httplib::Response& response) {
                std::string content_type = response.get_header_value("Content-Type");
                auto boundary = MultipartStreamParser::boundary_from_content_type(content_type);
                {
                    std::lock_guard<std::mutex> lock(impl->mutex);
                    impl->headers_seen = true;
                    if (response.status != 200)
                        impl->failure = "stream: HTTP status " + std::to_string(response.status);
                    else if (!boundary)
                        impl->failure = "stream: response is not a multipart MJPEG stream";
                }
                impl->cv.notify_all();
                if (!boundary) return false;
                parser = std::make_unique<MultipartStreamParser>(*boundary);
                return true;
            },
            [&](const char* data, std::size_t len) {
                if (impl->stopping.load()) return false;
                if (!parser) return false;
                for (auto& body : parser->feed(data, len)) {
                    try {
                        ImageRGB8 img = decode_jpeg(body);
                        TactileFrame frame;
                        frame.pixels = std::move(img);
                        {
                            std::lock_guard<std::mutex> lock(impl->mutex);
                            frame.frame_index = impl->next_index++;
                            frame.timestamp =
                                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                              impl->epoch)
                                    .count();
                            impl->queue.push_back(std::move(frame));
                        }
                        impl->cv.notify_one();
                    } catch (const error& e) {
                        log_warn(std::string("stream: skipping malformed JPEG part (") + e.what() +
                                 ")");
                    }
                }
                return !impl->stopping.load();
            });
        {
            std::lock_guard<std::mutex> lock(impl->mutex);
            impl->finished = true;
            impl->headers_seen = true;
            if (!result && impl->failure.empty() && !impl->stopping.load())
                impl->failure = "stream: connection failed (" + httplib::to_string(result.error()) +
                                ")";
        }
        impl->cv.notify_all();
    });

    // Surface connection errors at open time.
    std::unique_lock<std::mutex> lock(impl_->mutex);
    impl_->cv.wait(lock, [&] { return impl_->headers_seen || impl_->finished; });
    if (!impl_->failure.empty()) {
        lock.unlock();
        stop();
        throw source_error(impl_->failure);
    }
}

inline MjpegSource::~MjpegSource()
{
    stop();
}

inline void MjpegSource::stop()
{
    if (!impl_) return;
    impl_->stopping.store(true);
    impl_->client.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
    impl_->cv.notify_all();
}

inline std::optional<TactileFrame> MjpegSource::next()
{
    std::unique_lock<std::mutex> lock(impl_->mutex);
    impl_->cv.wait(lock, [&] { return !impl_->queue.empty() || impl_->finished; });
    if (impl_->queue.empty()) {
        if (!impl_->failure.empty()) throw source_error(impl_->failure);
        return std::nullopt;
    }
    TactileFrame frame = std::move(impl_->queue.front());
    impl_->queue.pop_front();
    return frame;
}

inline std::unique_ptr<FrameSource> open_source(const std::string& spec,
                                                const ReplayConfig& replay)
{
    if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0)
        return std::make_unique<MjpegSource>(spec);
    return std::make_unique<ReplaySource>(spec, replay);
}

} // namespace tacsole
