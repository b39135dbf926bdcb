// Mode/policy controls applied to the next question.  Changing a control
// restarts the session with the same passage and replays the transcript,
// so traces always come from the configured settings.

import type { Settings } from "./types.js";

const POLICIES = ["dynamic", "none", "init", "prev", "init-prev", "all"];

export function createControls(container: HTMLElement, initial: Settings,
                               onChange: (settings: Settings) => void) {
  const settings: Settings = { ...initial };
  container.append(heading("Controls"));

  const modeSelect = document.createElement("select");
  for (const mode of ["convsr", "pipeline", "baseline"]) {
    const option = document.createElement("option");
    option.value = mode;
    option.textContent = mode;
    modeSelect.append(option);
  }
  modeSelect.value = settings.mode;

  const policySelect = document.createElement("select");
  for (const policy of POLICIES) {
    const option = document.createElement("option");
    option.value = policy;
    option.textContent = policy;
    policySelect.append(option);
  }
  policySelect.value = settings.policy;

  const withSr = document.createElement("input");
  withSr.type = "checkbox";
  withSr.checked = settings.withSr;

  const theta = document.createElement("input");
  theta.type = "range";
  theta.min = "0";
  theta.max = "1";
  theta.step = "0.05";
  theta.value = String(settings.threshold);
  const thetaValue = document.createElement("span");
  thetaValue.className = "theta-value";
  thetaValue.textContent = settings.threshold.toFixed(2);

  const kInput = document.createElement("input");
  kInput.type = "number";
  kInput.min = "0";
  kInput.placeholder = "all";
  if (settings.k !== null) kInput.value = String(settings.k);

  container.append(
    row("Mode", modeSelect),
    row("Policy", policySelect),
    row("With SR", withSr),
    row("Threshold", theta, thetaValue),
    row("Max turns k", kInput),
  );

  function emit() {
    onChange({ ...settings });
  }

  modeSelect.addEventListener("change", () => {
    settings.mode = modeSelect.value as Settings["mode"];
    // baseline composes by policy; the other modes fix their own composition
    policySelect.disabled = settings.mode !== "baseline";
    withSr.disabled = settings.mode !== "baseline";
    emit();
  });
  policySelect.addEventListener("change", () => {
    settings.policy = policySelect.value;
    emit();
  });
  withSr.addEventListener("change", () => {
    settings.withSr = withSr.checked;
    emit();
  });
  theta.addEventListener("change", () => {
    settings.threshold = Number(theta.value);
    thetaValue.textContent = settings.threshold.toFixed(2);
    emit();
  });
  kInput.addEventListener("change", () => {
    settings.k = kInput.value === "" || Number(kInput.value) <= 0
      ? null
      : Number(kInput.value);
    emit();
  });
  policySelect.disabled = settings.mode !== "baseline";
  withSr.disabled = settings.mode !== "baseline";

  return {
    current(): Settings {
      return { ...settings };
    },
  };
}

function heading(text: string): HTMLElement {
  const node = document.createElement("h2");
  node.className = "panel-title";
  node.textContent = text;
  return node;
}

function row(label: string, ...inputs: HTMLElement[]): HTMLElement {
  const wrapper = document.createElement("label");
  wrapper.className = "control-row";
  const span = document.createElement("span");
  span.textContent = label;
  wrapper.append(span, ...inputs);
  return wrapper;
}
