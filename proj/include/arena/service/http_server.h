#ifndef ARENA_SERVICE_HTTP_SERVER_H_
#define ARENA_SERVICE_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "arena/service/arena_service.h"

namespace httplib {
class Server;
}

namespace arena::service {

// Serves ArenaService::handle over HTTP. Every response is JSON.
class HttpServer {
 public:
  explicit HttpServer(ArenaService& service);
  ~HttpServer();

  // Binds to host:port (port 0 picks a free one) and returns the port.
  // UnavailableError when binding fails.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void listen();
  void stop();

 private:
  ArenaService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace arena::service

#endif  // ARENA_SERVICE_HTTP_SERVER_H_
