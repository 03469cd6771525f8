#pragma once

#include "kleinian/core.hpp"
#include "kleinian/projective.hpp"
#include "kleinian/element_class.hpp"
#include "kleinian/cyclic_limit.hpp"
#include "kleinian/pseudo_projective.hpp"
#include "kleinian/group_engine.hpp"
#include "kleinian/io.hpp"
#include "kleinian/render.hpp"
#include "kleinian/cli.hpp"
