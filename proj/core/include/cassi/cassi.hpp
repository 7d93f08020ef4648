#pragma once

#include "cassi/dense_oracle.hpp"
#include "cassi/error.hpp"
#include "cassi/metrics.hpp"
#include "cassi/parallel.hpp"
#include "cassi/recon.hpp"
#include "cassi/scene_sim.hpp"
#include "cassi/sensing_operator.hpp"
#include "cassi/tensor.hpp"
