// Typed client for the recourse service. Every displayed value must come
// verbatim from these responses; the UI never recomputes labels or costs.

export type CategoricalFeature = {
  name: string;
  kind: "categorical";
  values: string[];
};

export type NumericFeature = {
  name: string;
  kind: "numeric";
  min: number;
  max: number;
  scale: number;
};

export type Feature = CategoricalFeature | NumericFeature;

export type Schema = { features: Feature[] };

export type JustificationNode = {
  goal: string;
  outcome: string;
  children: JustificationNode[];
};

export type ClassifyResponse = {
  label: string;
  justification: JustificationNode;
};

export type CfeResultPayload = {
  factual: Record<string, string | number>;
  counterfactual: {
    values: Record<string, string | number>;
    intervals: Record<string, [number, number]>;
  };
  controls: Record<string, number>;
  cost: number;
  justifications: {
    factual: JustificationNode;
    counterfactual: JustificationNode;
  };
};

export type InterpolantResponse =
  | { no_recourse: true }
  | { cost: number; results: CfeResultPayload[] };

export type ApiError = { error: { code: string; message: string } };

export type Policy = "any" | "immutable" | "increase" | "decrease" | "change";

export class ServiceError extends Error {
  code: string;
  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

async function request<T>(
  base: string,
  path: string,
  init: RequestInit,
): Promise<T> {
  const response = await fetch(base + path, init);
  const text = await response.text();
  let body: unknown;
  try {
    body = JSON.parse(text);
  } catch {
    throw new ServiceError("bad_response", `non-JSON response from ${path}`);
  }
  if (!response.ok) {
    const err = body as ApiError;
    if (err && typeof err === "object" && "error" in err) {
      throw new ServiceError(err.error.code, err.error.message);
    }
    throw new ServiceError("http_" + response.status, text);
  }
  return body as T;
}

export class Client {
  constructor(private base: string = "") {}

  getSchema(signal?: AbortSignal): Promise<Schema> {
    return request<Schema>(this.base, "/api/schema", { signal });
  }

  classify(
    instance: Record<string, string | number>,
    signal?: AbortSignal,
  ): Promise<ClassifyResponse> {
    return request<ClassifyResponse>(this.base, "/api/classify", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ instance }),
      signal,
    });
  }

  interpolant(
    instance: Record<string, string | number>,
    controls: Record<string, Policy>,
    signal?: AbortSignal,
  ): Promise<InterpolantResponse> {
    return request<InterpolantResponse>(this.base, "/api/interpolant", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ instance, controls }),
      signal,
    });
  }
}
