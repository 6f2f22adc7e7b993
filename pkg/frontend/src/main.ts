// Application wiring: one socket, one reducer-held model, one render loop.

import { CONTROLS, nextClientTag, validateControlValue, validateSpeed } from "./controls.js";
import { initialModel, markPending, reduce, type SessionModel } from "./model.js";
import type { GeneratorParams, UiEvent } from "./protocol.js";
import { SteeringSocket, defaultSocketUrl } from "./socket.js";
import { buildUi, RenderLoop, type UiHandlers } from "./view.js";

const DEFAULT_PARAMS: GeneratorParams = {
  m: 10,
  iterations: 5000,
  p: 0.5,
  u: 3,
  v: 3,
  alpha: 0.5,
  beta: 0.5,
  bounce: 0.5,
};

function start(root: HTMLElement): void {
  let model: SessionModel = initialModel();
  let openOnConnect: number | null = null;

  const socket = new SteeringSocket((event: UiEvent) => {
    model = reduce(model, event);
    if (event.type === "connected" && openOnConnect !== null) {
      sendOpen(openOnConnect);
      openOnConnect = null;
    }
    loop.schedule(model);
  });

  function sendOpen(seed: number): void {
    socket.send({
      type: "control",
      action: "open",
      params: { ...DEFAULT_PARAMS },
      seed,
    });
  }

  function showError(message: string): void {
    model.lastError = message;
    loop.schedule(model);
  }

  const handlers: UiHandlers = {
    onOpen(seed) {
      if (socket.connected) {
        sendOpen(seed);
      } else {
        openOnConnect = seed;
        socket.connect(defaultSocketUrl(window.location));
      }
    },
    onControl(action) {
      if (model.session === null) return;
      socket.send({ type: "control", action, session: model.session });
    },
    onPatch(key, value) {
      const spec = CONTROLS.find((s) => s.key === key);
      if (!spec || model.session === null) return;
      const failure = validateControlValue(spec, value);
      if (failure) {
        showError(failure.message); // invalid input never reaches the wire
        return;
      }
      const tag = nextClientTag();
      const patch = { [key]: value } as Partial<GeneratorParams>;
      markPending(model, tag, patch);
      socket.send({
        type: "param_update",
        session: model.session,
        patch,
        client_tag: tag,
      });
      loop.schedule(model);
    },
    onSpeed(value) {
      if (model.session === null) return;
      const problem = validateSpeed(value);
      if (problem) {
        showError(problem);
        return;
      }
      socket.send({
        type: "control",
        action: "set_speed",
        session: model.session,
        speed: value,
      });
    },
    onPullEdges() {
      if (model.session === null) return;
      socket.send({
        type: "control",
        action: "pull_edges",
        session: model.session,
      });
    },
  };

  const refs = buildUi(root, handlers);
  const loop = new RenderLoop(refs);
  loop.schedule(model);
  socket.connect(defaultSocketUrl(window.location));
}

const root = document.getElementById("app");
if (root) start(root);
