/**
 * Model JSON types (the `model` reply of the stepping service) and
 * resolution helpers: ancestry walks, inherited members, default values.
 */

export interface AttributeDef {
  name: string;
  type: string;
}

export interface ParamDef {
  name: string;
  type: string;
}

export interface MethodDef {
  name: string;
  static: boolean;
  params: ParamDef[];
  returns: string | null;
}

export interface ClassDef {
  name: string;
  attributes: AttributeDef[];
  methods: MethodDef[];
}

export interface RelationDef {
  id: string;
  kind: "association" | "composition";
  from: string;
  to: string;
  fromMult: string;
  toMult: string;
}

export interface ModelDoc {
  classes: ClassDef[];
  relations: RelationDef[];
  generalizations: { sub: string; super: string }[];
  /** Startable (non-empty-bodied) methods, as "Class.Method". */
  entryPoints?: string[];
}

export type TaggedValue =
  | { t: "int"; v: number }
  | { t: "real"; v: number }
  | { t: "str"; v: string }
  | { t: "bool"; v: boolean }
  | { t: "handle"; v: number | null }
  | { t: "set"; v: number[] };

export function classNamed(model: ModelDoc, name: string): ClassDef | undefined {
  return model.classes.find((c) => c.name === name);
}

/** Class name followed by its superclasses, nearest first (cycle-safe). */
export function ancestry(model: ModelDoc, name: string): string[] {
  const chain: string[] = [];
  const seen = new Set<string>();
  let cur: string | undefined = name;
  while (cur !== undefined && !seen.has(cur)) {
    chain.push(cur);
    seen.add(cur);
    cur = model.generalizations.find((g) => g.sub === cur)?.super;
  }
  return chain;
}

/** Own plus inherited attributes, root-most ancestor first. */
export function allAttributes(model: ModelDoc, cls: string): AttributeDef[] {
  const out: AttributeDef[] = [];
  for (const name of ancestry(model, cls).reverse()) {
    const c = classNamed(model, name);
    if (c) out.push(...c.attributes);
  }
  return out;
}

/**
 * The methods an instance of `cls` possesses: own and inherited, with
 * subclass definitions shadowing superclass ones by name.
 */
export function allMethods(model: ModelDoc, cls: string): MethodDef[] {
  const out: MethodDef[] = [];
  const named = new Set<string>();
  for (const name of ancestry(model, cls)) {
    const c = classNamed(model, name);
    if (!c) continue;
    for (const m of c.methods) {
      if (!named.has(m.name)) {
        named.add(m.name);
        out.push(m);
      }
    }
  }
  return out;
}

export function defaultValue(model: ModelDoc, type: string): TaggedValue {
  switch (type) {
    case "Integer":
      return { t: "int", v: 0 };
    case "Real":
      return { t: "real", v: 0 };
    case "Boolean":
      return { t: "bool", v: false };
    case "String":
      return { t: "str", v: "" };
    default:
      return { t: "handle", v: null }; // instance handle of a class type
  }
}

export function formatValue(v: TaggedValue | null): string {
  if (v === null) return "—";
  switch (v.t) {
    case "int":
      return String(v.v);
    case "real":
      return Number.isInteger(v.v) ? v.v.toFixed(1) : String(v.v);
    case "str":
      return JSON.stringify(v.v);
    case "bool":
      return v.v ? "true" : "false";
    case "handle":
      return v.v === null ? "none" : `→#${v.v}`;
    case "set":
      return `{${v.v.map((i) => `#${i}`).join(",")}}`;
  }
}

export function methodSignature(m: MethodDef): string {
  const params = m.params.map((p) => p.name).join(", ");
  return `${m.static ? "$" : ""}${m.name}(${params})`;
}
