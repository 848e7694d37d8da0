#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "mipseg/rng.hpp"
#include "mipseg/volume.hpp"

namespace mipseg {

/// Non-finite values where finite ones are required (loss, gradients).
/// The CLI maps this to exit code 4.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Compact residual U-Net: three resolution levels (two 2x2x2 max-pooling
/// steps), channels doubling per level, residual conv-ReLU-conv blocks,
/// nearest-neighbor upsampling with 1x1x1 projections, skip connections by
/// channel concatenation, logistic output head. Output dims equal input
/// dims; inputs must be divisible by 4.
struct NetConfig {
  int in_channels = 1;
  int base_channels = 8;
  int levels = 3;  // fixed
  int kernel = 3;  // fixed
  int residual_blocks_per_level = 1;
};

struct ConvSpec {
  std::string name;
  int cin = 0, cout = 0, kernel = 0;
  std::size_t w_offset = 0, b_offset = 0;
  std::size_t weight_count() const {
    return std::size_t(cin) * cout * kernel * kernel * kernel;
  }
};

struct NetLayout {
  std::vector<ConvSpec> convs;
  std::size_t param_count = 0;
};

NetLayout make_layout(const NetConfig& cfg);

/// Flat parameters plus ADAM moments, laid out per make_layout.
struct NetState {
  std::vector<double> params, adam_m, adam_v;
  std::int64_t step_count = 0;
};

/// Fan-in-scaled uniform conv weights (half-width sqrt(6/fan_in)), zero
/// biases. Weights are drawn in layout order.
NetState init_state(const NetConfig& cfg, Rng& rng);

namespace detail {
struct Tape;
}

/// One network instance; forward() keeps the activation tape so backward()
/// can reuse it.
class Network {
 public:
  explicit Network(const NetConfig& cfg);
  ~Network();
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;

  const NetConfig& config() const { return cfg_; }
  const NetLayout& layout() const { return layout_; }

  ScalarVolume forward(const NetState& state, const ScalarVolume& input);

  /// d(sum(loss_grad * output))/d(params); requires a prior forward() with
  /// matching dims.
  std::vector<double> backward(const NetState& state, const ScalarVolume& loss_grad);

 private:
  NetConfig cfg_;
  NetLayout layout_;
  std::unique_ptr<detail::Tape> tape_;
};

ScalarVolume net_forward(const NetState& state, const NetConfig& cfg,
                         const ScalarVolume& input);
std::vector<double> net_backward(const NetState& state, const NetConfig& cfg,
                                 const ScalarVolume& input,
                                 const ScalarVolume& loss_grad);

// NET1 container: magic "NET1"; u32 in_channels, base_channels, levels,
// kernel, residual_blocks_per_level; u64 param count; then params, adam_m,
// adam_v as f32 LE; u64 step_count.
void save_net(const std::filesystem::path& path, const NetConfig& cfg,
              const NetState& state);
std::pair<NetConfig, NetState> load_net(const std::filesystem::path& path);

}  // namespace mipseg
