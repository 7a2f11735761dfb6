// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#pragma once

#include <string>

namespace rwkvlab {
namespace detail {

template <class Params, class Visitor>
void visit_tensors(Params& p, Visitor& visit) {
  visit(std::string("token_embedding"), p.token_embedding);
  visit(std::string("ln0.gain"), p.ln0_gain);
  visit(std::string("ln0.bias"), p.ln0_bias);
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    auto& layer = p.layers[i];
    const std::string base = "layers." + std::to_string(i + 1) + ".";
    visit(base + "ln1.gain", layer.ln1_gain);
    visit(base + "ln1.bias", layer.ln1_bias);
    visit(base + "time_mix.w_r", layer.time_mix.w_r);
    visit(base + "time_mix.w_k", layer.time_mix.w_k);
    visit(base + "time_mix.w_v", layer.time_mix.w_v);
    visit(base + "time_mix.w_o", layer.time_mix.w_o);
    visit(base + "time_mix.lambda", layer.time_mix.lambda);
    visit(base + "time_mix.u", layer.time_mix.u);
    visit(base + "time_mix.mu_r", layer.time_mix.mu_r);
    visit(base + "time_mix.mu_k", layer.time_mix.mu_k);
    visit(base + "time_mix.mu_v", layer.time_mix.mu_v);
    visit(base + "ln2.gain", layer.ln2_gain);
    visit(base + "ln2.bias", layer.ln2_bias);
    visit(base + "channel_mix.w_r", layer.channel_mix.w_r);
    visit(base + "channel_mix.w_k", layer.channel_mix.w_k);
    visit(base + "channel_mix.w_v", layer.channel_mix.w_v);
    visit(base + "channel_mix.mu", layer.channel_mix.mu);
  }
}

}  // namespace detail

template <class Visitor>
void for_each_tensor(RwkvParams& p, Visitor&& visit) {
  detail::visit_tensors(p, visit);
}

template <class Visitor>
void for_each_tensor(const RwkvParams& p, Visitor&& visit) {
  detail::visit_tensors(p, visit);
}

}  // namespace rwkvlab
