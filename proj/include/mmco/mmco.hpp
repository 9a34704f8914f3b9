#pragma once

#include "mmco/error.hpp"
#include "mmco/profiles.hpp"
#include "mmco/model.hpp"
#include "mmco/assigner.hpp"
#include "mmco/timeline.hpp"
#include "mmco/simulator.hpp"
#include "mmco/export.hpp"
