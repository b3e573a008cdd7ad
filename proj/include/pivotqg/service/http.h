#pragma once

#include <memory>
#include <string>

#include "pivotqg/service/service.h"

namespace httplib {
class Server;
}

namespace pivotqg::service {

/// Routes the workbench API under /v1 onto a Service.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<Service> service);
  ~HttpServer();

  // Binds and serves until stop(). Port 0 picks a free port.
  void listen(const std::string& host, int port);
  // Binds without serving; returns the bound port. Pair with serve().
  int bind(const std::string& host, int port);
  void serve();
  void stop();
  bool running() const;

 private:
  std::shared_ptr<Service> service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace pivotqg::service
