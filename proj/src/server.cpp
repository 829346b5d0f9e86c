#include "igr/server.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <list>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "igr/dataset.hpp"
#include "igr/error.hpp"
#include "igr/image_io.hpp"

namespace igr {
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

constexpr const char* kBoundary = "igr-debug-layers";

std::string bytes_to_string(const std::vector<std::uint8_t>& b) { return std::string(b.begin(), b.end()); }

Image mask_image(const Mask& m) {
  Image img(m.height, m.width, 1);
  for (std::size_t i = 0; i < m.data.size(); ++i) img.data[i] = m.data[i] ? 1.0f : 0.0f;
  return img;
}

void add_part(std::string& body, const std::string& name, const std::string& type, const std::string& data) {
  body += "--";
  body += kBoundary;
  body += "\r\nContent-Type: " + type + "\r\nContent-Disposition: attachment; name=\"" + name + "\"; filename=\"" +
          name + "\"\r\n\r\n";
  body += data;
  body += "\r\n";
}

std::string content_type_for(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

int status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::NonDivisibleResolution:
    case ErrorKind::MalformedCameras: return 400;
    default: return 500;
  }
}

}  // namespace

json session_meta(const SessionState& session) {
  const Bounds& b = session.bounds;
  const Eigen::Vector3d c = b.center();
  return {{"name", session.name},
          {"resolution", {session.height, session.width}},
          {"reference_ids", session.references.ids()},
          {"views", session.config.views},
          {"uses_effects", session.effects.has_value()},
          {"bounds",
           {{"min", {b.min.x(), b.min.y(), b.min.z()}},
            {"max", {b.max.x(), b.max.y(), b.max.z()}},
            {"center", {c.x(), c.y(), c.z()}},
            {"radius", b.sphere_radius()}}},
          {"intrinsics", camera_to_json(session.intrinsics, -1)}};
}

EncodedRender encode_render(const SessionState& session, const RenderRequest& request) {
  const Camera camera = request_camera(session, request);
  RenderOutput r = render_novel_view(session, request);
  EncodedRender out;
  out.png = encode_png(r.image);
  out.out_of_bounds = r.out_of_bounds;
  if (!request.debug) return out;
  json meta = {{"camera", camera_to_json(camera, -1)}, {"out_of_bounds", r.out_of_bounds}};
  std::string body;
  add_part(body, "image.png", "image/png", bytes_to_string(out.png));
  if (r.debug) {
    const TargetPreparation& t = *r.debug;
    meta["selected_ids"] = t.selection.ids;
    meta["gains"] = t.selection.gains;
    for (std::size_t k = 0; k < t.warps.size(); ++k) {
      const std::string s = std::to_string(k);
      add_part(body, "warp_" + s + ".png", "image/png", bytes_to_string(encode_png(clamp01(t.warps[k].color))));
      add_part(body, "diffuse_warp_" + s + ".png", "image/png",
               bytes_to_string(encode_png(clamp01(t.diffuse_warps[k].color))));
      add_part(body, "mask_" + s + ".png", "image/png", bytes_to_string(encode_png(mask_image(t.warps[k].mask))));
    }
    if (!t.effects.empty()) add_part(body, "effects.png", "image/png", bytes_to_string(encode_png(t.effects)));
  }
  add_part(body, "meta.json", "application/json", meta.dump());
  body += "--";
  body += kBoundary;
  body += "--\r\n";
  out.content_type = std::string("multipart/mixed; boundary=") + kBoundary;
  out.body = std::move(body);
  return out;
}

struct RenderServer::Impl {
  std::shared_ptr<const SessionState> session;
  ServerOptions options;
  asio::io_context io;
  std::optional<tcp::acceptor> acceptor;
  std::thread accept_thread;
  std::atomic<bool> stopping{false};
  std::mutex mu;
  std::condition_variable cv;
  bool stopped = false;
  struct Worker {
    std::shared_ptr<tcp::socket> socket;
    std::shared_ptr<std::atomic<bool>> done;
    std::thread thread;
  };
  std::list<Worker> workers;

  using Request = http::request<http::string_body>;
  using Response = http::response<http::string_body>;

  Response make_response(const Request& req, http::status status, std::string type, std::string body) {
    Response res{status, req.version()};
    res.set(http::field::server, "igr");
    res.set(http::field::content_type, type);
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  Response error_response(const Request& req, int status, const std::string& message) {
    return make_response(req, static_cast<http::status>(status), "application/json",
                         json{{"error", message}}.dump());
  }

  Response serve_static(const Request& req, std::string target) {
    if (!options.viewer_root) return error_response(req, 404, "not found");
    const auto q = target.find('?');
    if (q != std::string::npos) target.resize(q);
    if (target.empty() || target == "/") target = "/index.html";
    if (target.find("..") != std::string::npos) return error_response(req, 400, "invalid path");
    const std::filesystem::path path = *options.viewer_root / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (!in) return error_response(req, 404, "not found");
    std::ostringstream ss;
    ss << in.rdbuf();
    return make_response(req, http::status::ok, content_type_for(path), ss.str());
  }

  Response handle(const Request& req) {
    const std::string target(req.target());
    try {
      if (req.method() == http::verb::get && target == "/healthz")
        return make_response(req, http::status::ok, "text/plain", "ok");
      if (req.method() == http::verb::get && target == "/meta")
        return make_response(req, http::status::ok, "application/json", session_meta(*session).dump());
      if (req.method() == http::verb::post && target == "/render") {
        const RenderRequest r = parse_render_request(json::parse(req.body()));
        EncodedRender enc = encode_render(*session, r);
        Response res = r.debug ? make_response(req, http::status::ok, enc.content_type, std::move(enc.body))
                               : make_response(req, http::status::ok, "image/png", bytes_to_string(enc.png));
        if (enc.out_of_bounds) res.set("X-Render-Warning", "out-of-bounds");
        return res;
      }
      if (req.method() == http::verb::post && target == "/camera") {
        const RenderRequest r = parse_render_request(json::parse(req.body()));
        const json j = {{"camera", camera_to_json(request_camera(*session, r), -1)}};
        return make_response(req, http::status::ok, "application/json", j.dump());
      }
      if (req.method() == http::verb::get) return serve_static(req, target);
      return error_response(req, 405, "method not allowed");
    } catch (const json::exception& e) {
      return error_response(req, 400, std::string("malformed JSON: ") + e.what());
    } catch (const Error& e) {
      return error_response(req, status_for(e), e.what());
    } catch (const std::exception& e) {
      return error_response(req, 500, e.what());
    }
  }

  void stream(websocket::stream<tcp::socket&>& ws) {
    beast::flat_buffer buffer;
    for (;;) {
      ws.read(buffer);
      const std::string text = beast::buffers_to_string(buffer.data());
      buffer.consume(buffer.size());
      std::uint64_t seq = 0;
      try {
        const json msg = json::parse(text);
        seq = msg.value("seq", std::uint64_t{0});
        RenderRequest r = parse_render_request(msg);
        r.debug = false;
        const EncodedRender enc = encode_render(*session, r);
        std::vector<std::uint8_t> frame(8 + enc.png.size());
        for (int i = 0; i < 8; ++i) frame[i] = static_cast<std::uint8_t>(seq >> (8 * i));
        std::copy(enc.png.begin(), enc.png.end(), frame.begin() + 8);
        ws.binary(true);
        ws.write(asio::buffer(frame));
      } catch (const std::exception& e) {
        ws.text(true);
        ws.write(asio::buffer(json{{"seq", seq}, {"error", e.what()}}.dump()));
      }
    }
  }

  void connection(std::shared_ptr<tcp::socket> socket) {
    beast::error_code ec;
    beast::flat_buffer buffer;
    try {
      for (;;) {
        Request req;
        http::read(*socket, buffer, req, ec);
        if (ec) break;
        if (websocket::is_upgrade(req)) {
          if (std::string(req.target()) != "/stream") {
            http::write(*socket, error_response(req, 404, "unknown websocket endpoint"), ec);
            break;
          }
          websocket::stream<tcp::socket&> ws(*socket);
          ws.accept(req);
          stream(ws);
          break;
        }
        Response res = handle(req);
        const bool keep = res.keep_alive();
        http::write(*socket, res, ec);
        if (ec || !keep) break;
      }
    } catch (const std::exception&) {
      // Peer went away or the server is stopping.
    }
    beast::error_code ignored;
    socket->shutdown(tcp::socket::shutdown_both, ignored);
    socket->close(ignored);
  }

  void accept_loop() {
    for (;;) {
      auto socket = std::make_shared<tcp::socket>(io);
      beast::error_code ec;
      acceptor->accept(*socket, ec);
      if (stopping) break;
      if (ec) continue;
      socket->set_option(tcp::no_delay(true), ec);
      std::lock_guard<std::mutex> lock(mu);
      for (auto it = workers.begin(); it != workers.end();) {
        if (*it->done) {
          it->thread.join();
          it = workers.erase(it);
        } else {
          ++it;
        }
      }
      auto done = std::make_shared<std::atomic<bool>>(false);
      workers.push_back({socket, done, std::thread([this, socket, done] {
                           connection(socket);
                           *done = true;
                         })});
    }
  }
};

RenderServer::RenderServer(std::shared_ptr<const SessionState> session, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->session = std::move(session);
  impl_->options = std::move(options);
}

RenderServer::~RenderServer() { stop(); }

void RenderServer::start() {
  Impl& s = *impl_;
  beast::error_code ec;
  const auto address = asio::ip::make_address(s.options.address, ec);
  require(!ec, ErrorKind::InvalidArgument, "invalid listen address " + s.options.address);
  const tcp::endpoint endpoint(address, static_cast<unsigned short>(s.options.port));
  s.acceptor.emplace(s.io);
  s.acceptor->open(endpoint.protocol(), ec);
  if (!ec) s.acceptor->bind(endpoint, ec);
  if (ec == asio::error::address_in_use || ec == asio::error::access_denied)
    throw Error(ErrorKind::PortInUse, "port " + std::to_string(s.options.port) + " is in use");
  require(!ec, ErrorKind::Io, "cannot bind: " + ec.message());
  s.acceptor->listen(asio::socket_base::max_listen_connections, ec);
  require(!ec, ErrorKind::Io, "cannot listen: " + ec.message());
  s.accept_thread = std::thread([&s] { s.accept_loop(); });
}

int RenderServer::port() const { return impl_->acceptor ? impl_->acceptor->local_endpoint().port() : 0; }

void RenderServer::wait() {
  std::unique_lock<std::mutex> lock(impl_->mu);
  impl_->cv.wait(lock, [this] { return impl_->stopped; });
}

void RenderServer::stop() {
  Impl& s = *impl_;
  if (!s.acceptor || s.stopping.exchange(true)) return;
  beast::error_code ec;
  // Wake the blocking accept with a throwaway connection, then close.
  {
    tcp::socket poke(s.io);
    poke.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), s.acceptor->local_endpoint().port()), ec);
  }
  if (s.accept_thread.joinable()) s.accept_thread.join();
  s.acceptor->close(ec);
  std::list<Impl::Worker> workers;
  {
    std::lock_guard<std::mutex> lock(s.mu);
    for (auto& w : s.workers) w.socket->shutdown(tcp::socket::shutdown_both, ec);
    workers.swap(s.workers);
  }
  for (auto& w : workers) w.thread.join();
  {
    std::lock_guard<std::mutex> lock(s.mu);
    s.stopped = true;
  }
  s.cv.notify_all();
}

}  // namespace igr
