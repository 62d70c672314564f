#pragma once

#include "glb/allocator.hpp"
#include "glb/config_file.hpp"
#include "glb/emit.hpp"
#include "glb/errors.hpp"
#include "glb/flowgraph.hpp"
#include "glb/model.hpp"
#include "glb/power.hpp"
#include "glb/queueing.hpp"
#include "glb/traces.hpp"
#include "glb/tradeoff.hpp"
#include "glb/types.hpp"
