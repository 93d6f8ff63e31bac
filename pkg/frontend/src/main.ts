import { Client } from "./api";
import { WizardStore } from "./store";
import { renderWizard } from "./wizard";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}

const store = new WizardStore(new Client(""));
store.subscribe(() => renderWizard(root, store));
renderWizard(root, store);
