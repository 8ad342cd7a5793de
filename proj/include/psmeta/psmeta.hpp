#pragma once

#include "psmeta/agent.hpp"
#include "psmeta/analysis.hpp"
#include "psmeta/clip_network.hpp"
#include "psmeta/config.hpp"
#include "psmeta/ensemble.hpp"
#include "psmeta/env/grid_world.hpp"
#include "psmeta/env/invasion.hpp"
#include "psmeta/env/maps.hpp"
#include "psmeta/env/nship.hpp"
#include "psmeta/error.hpp"
#include "psmeta/meta_control.hpp"
#include "psmeta/presets.hpp"
#include "psmeta/random.hpp"
#include "psmeta/validation.hpp"
