/** Wire types for the annotation service. */
export {};
